use opengossip::analytic::{fixed_point, growing_trajectory, GrowingRecursionState};
use opengossip::report::{compare, CompareOptions};
use opengossip::sim::{run_ensemble, run_growing, RngStream};
use opengossip::{ArrivalDistribution, DistKind, Schedule, SimConfig};

fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    xs[xs.len() / 2]
}

#[test]
fn growing_without_gossip_is_iid() {
    let d = ArrivalDistribution::new(DistKind::Gaussian, 1.0).unwrap();
    let cfg = SimConfig::growing(1, Schedule::constant(1.0), d, 199).with_replicates(2000);
    let ens = run_ensemble(&cfg, 5).unwrap();
    for (m, se) in ens.mean_trajectory.samples.iter().zip(&ens.stderr_trajectory.samples) {
        let want = 1.0 - 1.0 / m.n as f64;
        if se.variance > 0.0 {
            assert!((m.variance - want).abs() <= 4.0 * se.variance, "n = {}", m.n);
        } else {
            assert_eq!(m.n, 1);
            assert_eq!(m.variance, 0.0);
        }
    }
    // No gossip means every arrival is the next event.
    assert_eq!(ens.mean_trajectory.last().unwrap().t, 199.0);
}

#[test]
fn fixed_arrival_rate_drives_variance_down() {
    let cfg = SimConfig::growing(
        1,
        Schedule::FixedArrivalRate {
            lambda_a: 1.0,
            lambda_g: 1.0,
        },
        ArrivalDistribution::new(DistKind::UniformCentered, 1.0).unwrap(),
        399,
    )
    .with_replicates(200);
    let ens = run_ensemble(&cfg, 17).unwrap();
    let v = |n: usize| ens.mean_trajectory.samples[n - 1].variance;
    assert!(v(400) < v(100));
    assert!(v(100) < v(20));
    assert!(v(400) < 0.05);

    let an = growing_trajectory(GrowingRecursionState::single_agent(1.0), &cfg.schedule, 1.0, 400).unwrap();
    let verdicts = compare(&ens, &an, CompareOptions::default()).unwrap();
    assert!(verdicts.iter().all(|v| v.pass), "{verdicts:?}");
}

#[test]
fn stderr_scales_as_inverse_root_replicates() {
    let cfg = SimConfig::fixed(10, 0.2, ArrivalDistribution::unit_uniform(), 200);
    let small = run_ensemble(&cfg.clone().with_replicates(1000), 1).unwrap();
    let large = run_ensemble(&cfg.with_replicates(4000), 2).unwrap();
    let m_small = median(small.stderr_trajectory.variances().collect());
    let m_large = median(large.stderr_trajectory.variances().collect());
    let ratio = m_small / m_large;
    assert!((ratio - 2.0).abs() <= 0.4, "ratio {ratio}");
}

#[test]
fn fixed_size_ensemble_settles_at_equilibrium() {
    let (n, p) = (10, 0.3);
    let d = ArrivalDistribution::new(DistKind::TwoPoint, 2.0).unwrap();
    let cfg = SimConfig::fixed(n, p, d, 600).with_replicates(3000);
    let ens = run_ensemble(&cfg, 99).unwrap();
    let fp = fixed_point(n, p, 2.0).unwrap();
    let last = ens.mean_trajectory.last().unwrap();
    let se = ens.stderr_trajectory.last().unwrap();
    assert!((last.variance - fp.variance()).abs() <= 4.0 * se.variance);
    assert!((last.sq_mean - fp.sq_mean).abs() <= 4.0 * se.sq_mean);
}

#[test]
fn growing_trajectory_sizes_are_consecutive() {
    let cfg = SimConfig::growing(3, Schedule::Harmonic, ArrivalDistribution::unit_uniform(), 40);
    let traj = run_growing(&cfg, RngStream::new(8, 0)).unwrap();
    let ns: Vec<usize> = traj.samples.iter().map(|s| s.n).collect();
    assert_eq!(ns, (3..=43).collect::<Vec<_>>());
    assert!(traj.is_time_increasing());
}
