//! Experiment-harness invariants on the calibrated default chain.

use proptest::prelude::*;
use wov_core::impairments::{ChainConfig, ProbePoint};
use wov_core::noise::{rand_bytes, rng_from_seed};
use wov_core::phy::{generate_ppdu, Bandwidth, GuardInterval, PpduConfig};
use wov_sim::config::RunConfig;
use wov_sim::experiments::{
    distance_for_rssi, distortion_report, fsr_sweep, max_distance, rssi_from_distance, DistanceVariant, LinkSetup,
};
use wov_sim::io::{fsr_csv, read_iq, write_iq};

fn chain() -> ChainConfig {
    RunConfig::default().chain_for(Bandwidth::MHz20).unwrap()
}

fn link(n_frames: usize, seed: u64) -> LinkSetup {
    LinkSetup { n_frames, seed, ..LinkSetup::default() }
}

fn fsr_at(mcs: u8, rssi: f64, n_frames: usize) -> f64 {
    fsr_sweep(&[mcs], &[rssi], &link(n_frames, 1), &chain()).unwrap()[0].points[0].fsr
}

/// First RSSI on a 0.5 dB walk where the FSR reaches `level`, interpolated.
fn crossing(mcs: u8, level: f64, start: f64, n_frames: usize) -> f64 {
    let (mut r, mut f) = (start, fsr_at(mcs, start, n_frames));
    assert!(f < level, "MCS {mcs}: start {start} dBm already at FSR {f}");
    loop {
        let f2 = fsr_at(mcs, r + 0.5, n_frames);
        if f2 >= level {
            return r + 0.5 * (level - f) / (f2 - f);
        }
        (r, f) = (r + 0.5, f2);
        assert!(r < 0.0, "MCS {mcs} never reached {level}");
    }
}

#[test]
fn waterfall_is_sharp_for_every_mcs() {
    for mcs in 0..8u8 {
        let start = -64.0 + 3.0 * mcs as f64;
        let lo = crossing(mcs, 0.1, start, 200);
        let hi = crossing(mcs, 0.9, lo.floor(), 200);
        assert!(hi - lo <= 5.0, "MCS {mcs}: FSR 0.1 at {lo:.2} dBm, 0.9 at {hi:.2} dBm");
    }
}

#[test]
fn fsr_points_are_exact_ratios_and_sorted() {
    let curves = fsr_sweep(&[1, 5], &[-40.0, -58.0, -50.0], &link(30, 4), &chain()).unwrap();
    for c in &curves {
        assert!(c.points.windows(2).all(|w| w[0].rssi_dbm < w[1].rssi_dbm));
        for p in &c.points {
            assert_eq!(p.fsr, p.n_ok as f64 / p.n_frames as f64);
            assert_eq!(p.n_frames, 30);
        }
    }
}

#[test]
fn sweep_is_independent_of_thread_count() {
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| fsr_csv(&fsr_sweep(&[2, 6], &[-52.0, -38.0], &link(40, 11), &chain()).unwrap()))
    };
    assert_eq!(run(1), run(3));
}

#[test]
fn different_seeds_give_different_trials() {
    let a = fsr_sweep(&[0], &[-58.5], &link(200, 1), &chain()).unwrap();
    let b = fsr_sweep(&[0], &[-58.5], &link(200, 2), &chain()).unwrap();
    assert_ne!(a[0].points[0].n_ok, b[0].points[0].n_ok);
}

#[test]
fn more_photodiode_noise_lowers_fsr() {
    for (mcs, rssi) in [(0u8, -58.0), (4, -45.0)] {
        let fsr = |pd: f64| {
            let cfg = ChainConfig { pd_noise_floor_dbm: pd, ..chain() };
            fsr_sweep(&[mcs], &[rssi], &link(300, 6), &cfg).unwrap()[0].points[0].fsr
        };
        let (quiet, loud) = (fsr(-62.0), fsr(-58.0));
        assert!(loud < quiet, "MCS {mcs}: {quiet} -> {loud}");
    }
}

#[test]
fn linear_pa_leaves_fsr_unchanged_at_equal_rssi() {
    let n = 300;
    let fsr = |pa: f64| {
        let cfg = ChainConfig { pa_gain_db: pa, pa_clip_backoff_db: 40.0, ..chain() };
        fsr_sweep(&[3], &[-51.0], &link(n, 8), &cfg).unwrap()[0].points[0].fsr
    };
    let (bare, boosted) = (fsr(0.0), fsr(5.0));
    assert!(bare > 0.05 && bare < 0.95, "operating point off the waterfall: {bare}");
    assert!((bare - boosted).abs() <= 2.0 / (n as f64).sqrt(), "{bare} vs {boosted}");
}

#[test]
fn infeasible_rssi_is_rejected() {
    assert!(fsr_sweep(&[0], &[0.0], &link(1, 1), &chain()).is_err());
    assert!(fsr_sweep(&[0], &[], &link(1, 1), &chain()).is_err());
    assert!(fsr_sweep(&[0], &[-50.0], &link(0, 1), &chain()).is_err());
}

#[test]
fn doubling_distance_costs_six_db() {
    let cfg = chain();
    let near = rssi_from_distance(0.25, &cfg).unwrap();
    let far = rssi_from_distance(0.5, &cfg).unwrap();
    assert!((near - far - 20.0 * 2f64.log10()).abs() < 1e-9);
}

#[test]
fn distance_search_brackets_the_threshold() {
    let cfg = chain();
    let v = DistanceVariant { pa_gain_db: 0.0, lens: false };
    let r = &max_distance(&[v], &[7], 0.9, &link(150, 5), &cfg).unwrap()[0];
    assert!(r.reachable);
    assert!(r.fsr_at_max >= 0.9, "{r:?}");
    assert!(r.fsr_beyond < 0.9, "{r:?}");

    // Clipping in the boosted chain keeps 16-QAM from ever decoding.
    let boosted = DistanceVariant { pa_gain_db: 20.0, lens: true };
    let r = &max_distance(&[boosted], &[3], 0.9, &link(50, 5), &cfg).unwrap()[0];
    assert!(!r.reachable);
    assert_eq!(r.max_distance_m, 0.0);
}

#[test]
fn report_lists_taps_in_signal_order_with_c_predicted() {
    let ppdu = PpduConfig::for_payload(3, Bandwidth::MHz20, GuardInterval::Long, 300).unwrap();
    let taps = [ProbePoint::E, ProbePoint::C, ProbePoint::A];
    let report = distortion_report(&chain(), &ppdu, &taps, 2, 1).unwrap();
    let order: Vec<_> = report.rows.iter().map(|r| r.point).collect();
    assert_eq!(order, [ProbePoint::A, ProbePoint::C, ProbePoint::E]);
    assert!(report.rows.iter().all(|r| r.predicted == (r.point == ProbePoint::C)));
    assert_eq!(report.captures.len(), 3);
}

#[test]
fn iq_file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = PpduConfig::for_payload(4, Bandwidth::MHz40, GuardInterval::Short, 200).unwrap();
    let mut w = generate_ppdu(&rand_bytes(&mut rng_from_seed(3), 200), &cfg).unwrap();
    w.ref_power_dbm = -17.25;
    w.center_hz = 37e6;
    let path = dir.path().join("x.cf32");
    write_iq(&path, &w).unwrap();
    assert_eq!(std::fs::metadata(&path).unwrap().len(), 8 * w.samples.len() as u64);
    let back = read_iq(&path).unwrap();
    assert_eq!(back.sample_rate, w.sample_rate);
    assert_eq!(back.ref_power_dbm, w.ref_power_dbm);
    assert_eq!(back.center_hz, w.center_hz);
    assert_eq!(back.data_start, w.data_start);
    for (a, b) in back.samples.iter().zip(&w.samples) {
        assert!((a - b).norm() < 1e-6);
    }

    std::fs::write(&path, [0u8; 12]).unwrap();
    assert!(read_iq(&path).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rssi_falls_with_distance(d in 0.02f64..50.0, k in 1.01f64..5.0) {
        let cfg = chain();
        prop_assert!(rssi_from_distance(d * k, &cfg).unwrap() < rssi_from_distance(d, &cfg).unwrap());
    }

    #[test]
    fn distance_for_rssi_inverts_rssi_from_distance(d in 0.02f64..50.0, lens in any::<bool>(), pa in 0.0f64..25.0) {
        let cfg = ChainConfig { lens, pa_gain_db: pa, ..chain() };
        let r = rssi_from_distance(d, &cfg).unwrap();
        let back = distance_for_rssi(r, &cfg).unwrap();
        prop_assert!((back - d).abs() < 1e-9 * d.max(1.0));
    }
}
