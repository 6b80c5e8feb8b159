use fourlin_core::bench::{sweep_statistical, SweepBase};

#[test]
fn probe() {
    let stat_base = SweepBase { n_test: 50, ..SweepBase::default() };
    let stat = sweep_statistical(&stat_base, 32, 15, &[10, 20, 40, 80, 160], 3).unwrap();
    for p in &stat.points {
        println!("n={:5} mean={:.6e} std={:.3e}", p.value, p.mean_rel_mse, p.std_rel_mse);
    }
    println!("slope={:.3}", stat.middle_third_slope());
}
