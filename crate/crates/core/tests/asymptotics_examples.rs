use sqwalk::asymptotics::{
    c2_direct, lambda_approx, lambda_root, optimal_time, overlaps, symmetry_summand, AsymptoticsRecord,
};
use sqwalk::dense::{dense_operator, eigenvector_for, smallest_positive_eigenphase};
use sqwalk::experiments::run_search;
use sqwalk::experiments::SearchOptions;
use sqwalk::spectral::MomentumPair;
use sqwalk::walk::{initial_state, WalkConfig};
use sqwalk::{Complex64, LatticeSpec, Ordering};
use std::f64::consts::{FRAC_PI_4, PI};

#[test]
fn lambda_times_n_c_approaches_one() {
    let n = 64;
    let product = lambda_root::<f64>(n).unwrap() * n as f64 * c2_direct::<f64>(n).unwrap().sqrt();
    assert!((product - 1.0).abs() < 0.1, "{product}");
}

#[test]
fn approximation_ratio_in_band() {
    for n in [32, 48, 64, 96, 128] {
        let ratio = lambda_approx::<f64>(n).unwrap() / lambda_root::<f64>(n).unwrap();
        assert!((0.8..=1.2).contains(&ratio), "n={n}: {ratio}");
    }
}

#[test]
fn inverse_approx_grows_like_sqrt_n_log_n() {
    let scaled: Vec<f64> = [16usize, 32, 64, 128, 256]
        .iter()
        .map(|&n| {
            let big_n = (4 * n * n) as f64;
            1.0 / lambda_approx::<f64>(n).unwrap() / (big_n * big_n.ln()).sqrt()
        })
        .collect();
    let max = scaled.iter().copied().fold(f64::MIN, f64::max);
    let min = scaled.iter().copied().fold(f64::MAX, f64::min);
    assert!(max / min < 2.0, "{scaled:?}");
}

#[test]
fn overlaps_against_dense_eigenvector() {
    for n in 4..=12 {
        let lattice = LatticeSpec::new(n).unwrap();
        let m = dense_operator(&WalkConfig::<f64>::default(), &lattice).unwrap();
        let lambda = smallest_positive_eigenphase(&m, 1e-9).unwrap().unwrap();
        let v = eigenvector_for(&m, Complex64::from_polar(1.0, lambda)).unwrap();
        let predicted = overlaps(n, lambda);
        let marked = v[0].norm();
        assert!((marked / predicted.marked - 1.0).abs() < 0.2, "n={n}: {marked} vs {}", predicted.marked);
        let psi0 = initial_state::<f64>(lattice);
        let initial: Complex64 = psi0.amplitudes().iter().zip(v.iter()).map(|(a, b)| a.conj() * b).sum();
        assert!((initial.norm() / predicted.initial.norm() - 1.0).abs() < 0.2, "n={n}");
    }
}

#[test]
fn symmetry_summand_pairing() {
    let n = 7;
    for k in 0..2 * n {
        for l in 0..2 * n {
            let m = MomentumPair::new(k, l, n).unwrap();
            let Some(g) = symmetry_summand::<f64>(m) else { continue };
            let flip = MomentumPair::new((3 * n - k) % (2 * n), (3 * n - l) % (2 * n), n).unwrap();
            let shift = MomentumPair::new((n + k) % (2 * n), (n + l) % (2 * n), n).unwrap();
            let flipped = symmetry_summand::<f64>(flip).unwrap();
            let shifted = symmetry_summand::<f64>(shift).unwrap();
            assert!((g + flipped).abs() < 1e-9 * g.abs().max(1.0), "({k},{l})");
            // the half-period shift is a symmetry of the summand, not a cancellation
            assert!((g - shifted).abs() < 1e-9 * g.abs().max(1.0), "({k},{l})");
        }
    }
}

#[test]
fn measured_peak_sits_on_the_wraparound_kink() {
    // from n = 32 on, the first maximum lands on t = 2n − 1 where the
    // marked-vertex curve has a kink, drifting away from round(π/(2λ))
    let offsets: Vec<i64> = [16usize, 32, 64, 128]
        .iter()
        .map(|&n| {
            let run = run_search(n, FRAC_PI_4, Ordering::DEFAULT, &SearchOptions::default()).unwrap();
            if n >= 32 {
                assert_eq!(run.record.t_opt, 2 * n - 1, "n={n}");
            }
            run.record.t_opt as i64 - optimal_time(run.record.lambda) as i64
        })
        .collect();
    assert_eq!(offsets, vec![-5, 3, -2, -20]);
}

#[test]
fn record_fields_are_consistent() {
    let r = AsymptoticsRecord::compute(16).unwrap();
    assert!((r.overlap_marked - 16.0 * r.lambda_exact / 2.0).abs() < 1e-15);
    assert!((r.t_opt - PI / (2.0 * r.lambda_exact)).abs() < 1e-12);
    assert!((r.p_model - 2.0 * r.overlap_marked.powi(2)).abs() < 1e-12);
}
