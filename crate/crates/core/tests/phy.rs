use rand::{Rng, RngCore};
use wov_core::noise::{complex_gaussian, rng_from_seed};
use wov_core::phy::mcs::{Bandwidth, GuardInterval, McsParams, PpduConfig};
use wov_core::phy::{generate_ppdu, receive_ppdu};
use wov_core::{Error, Waveform};

fn payload(len: usize, seed: u64) -> Vec<u8> {
    let mut rng = rng_from_seed(seed);
    let mut v = vec![0u8; len];
    rng.fill_bytes(&mut v);
    v
}

fn add_awgn(w: &mut Waveform, snr_db: f64, seed: u64) {
    let var = 10f64.powf(-snr_db / 10.0);
    let mut rng = rng_from_seed(seed);
    for s in &mut w.samples {
        *s += complex_gaussian(&mut rng, var);
    }
}

#[test]
fn loopback_every_mode() {
    for mcs in McsParams::all() {
        for bw in Bandwidth::ALL {
            for gi in GuardInterval::ALL {
                for trial in 0..3 {
                    let len = 1 + (trial * 577) % 1500;
                    let cfg = PpduConfig::for_payload(mcs.index, bw, gi, len).unwrap();
                    let data = payload(len, trial as u64 + 17 * mcs.index as u64);
                    let w = generate_ppdu(&data, &cfg).unwrap();
                    let rx = receive_ppdu(&w, &cfg).unwrap();
                    assert!(rx.stats.fcs_ok, "{mcs:?} {bw:?} {gi:?}");
                    assert_eq!(rx.payload, data);
                    assert!(rx.stats.evm_percent < 1.0);
                    assert_eq!(
                        rx.stats.constellation_points.len(),
                        cfg.n_symbols() * bw.n_data_subcarriers()
                    );
                }
            }
        }
    }
}

#[test]
fn awgn_snr_is_measured() {
    let cfg = PpduConfig::for_payload(3, Bandwidth::MHz20, GuardInterval::Long, 1000).unwrap();
    let mut w = generate_ppdu(&payload(1000, 1), &cfg).unwrap();
    add_awgn(&mut w, 32.32, 99);
    let rx = receive_ppdu(&w, &cfg).unwrap();
    assert!(rx.stats.fcs_ok);
    assert!((rx.stats.snr_db - 32.32).abs() <= 1.0, "{}", rx.stats.snr_db);
    assert!((rx.stats.snr_db - (rx.stats.rssi_dbm - rx.stats.noise_dbm)).abs() < 0.1);
}

#[test]
fn evm_tracks_awgn() {
    // Pure AWGN: EVM = 100 / sqrt(SNR) for the injected SNR.
    for (i, snr_db) in [10.0, 15.0, 20.0, 25.0, 30.0, 35.0].into_iter().enumerate() {
        let cfg = PpduConfig::for_payload(1, Bandwidth::MHz20, GuardInterval::Long, 1000).unwrap();
        let mut w = generate_ppdu(&payload(1000, i as u64), &cfg).unwrap();
        add_awgn(&mut w, snr_db, 1000 + i as u64);
        let rx = receive_ppdu(&w, &cfg).unwrap();
        assert!(rx.stats.fcs_ok);
        let expected = 100.0 / 10f64.powf(snr_db / 10.0).sqrt();
        let rel = (rx.stats.evm_percent - expected).abs() / expected;
        assert!(rel < 0.10, "snr {snr_db}: evm {} vs {expected}", rx.stats.evm_percent);
    }
}

#[test]
fn flat_gain_only_moves_rssi() {
    let cfg = PpduConfig::for_payload(5, Bandwidth::MHz40, GuardInterval::Short, 700).unwrap();
    let data = payload(700, 5);
    let w = generate_ppdu(&data, &cfg).unwrap();
    let a = receive_ppdu(&w, &cfg).unwrap();
    let mut half = w.clone();
    half.scale(0.5);
    let b = receive_ppdu(&half, &cfg).unwrap();
    assert_eq!(a.payload, b.payload);
    assert!(b.stats.fcs_ok);
    assert!((a.stats.rssi_dbm - b.stats.rssi_dbm - 6.0206).abs() < 1e-3);
}

#[test]
fn per_subcarrier_power_flat_on_clean_link() {
    let cfg = PpduConfig::for_payload(3, Bandwidth::MHz20, GuardInterval::Long, 300).unwrap();
    let w = generate_ppdu(&payload(300, 8), &cfg).unwrap();
    let rx = receive_ppdu(&w, &cfg).unwrap();
    assert_eq!(rx.stats.per_subcarrier_power.len(), 56);
    let max = rx.stats.per_subcarrier_power.iter().cloned().fold(f64::MIN, f64::max);
    let min = rx.stats.per_subcarrier_power.iter().cloned().fold(f64::MAX, f64::min);
    assert!(max - min < 1e-6);
}

#[test]
fn sync_failure_is_distinct_from_fcs_failure() {
    let cfg = PpduConfig::for_payload(0, Bandwidth::MHz20, GuardInterval::Long, 100).unwrap();
    let w = generate_ppdu(&payload(100, 3), &cfg).unwrap();

    let mut short = w.clone();
    short.samples.truncate(500);
    assert_eq!(receive_ppdu(&short, &cfg).unwrap_err(), Error::SyncNotFound);

    let mut rng = rng_from_seed(4);
    let mut garbage = w.clone();
    for s in &mut garbage.samples {
        *s = complex_gaussian(&mut rng, 1.0);
    }
    assert_eq!(receive_ppdu(&garbage, &cfg).unwrap_err(), Error::SyncNotFound);

    // Corrupt the data field only: frame found, FCS fails.
    let mut corrupt = w.clone();
    let start = corrupt.data_start.unwrap();
    for s in &mut corrupt.samples[start..] {
        *s = complex_gaussian(&mut rng, 1.0) * 3.0 + rng.random::<f64>();
    }
    let rx = receive_ppdu(&corrupt, &cfg).unwrap();
    assert!(!rx.stats.fcs_ok);

    let mut wrong_rate = w;
    wrong_rate.sample_rate = 40e6;
    assert!(matches!(receive_ppdu(&wrong_rate, &cfg), Err(Error::SampleRate { .. })));
}

#[test]
fn shorter_at_higher_mcs() {
    let data = payload(1000, 9);
    let w0 = generate_ppdu(&data, &PpduConfig::for_payload(0, Bandwidth::MHz20, GuardInterval::Long, 1000).unwrap()).unwrap();
    let w7 = generate_ppdu(&data, &PpduConfig::for_payload(7, Bandwidth::MHz20, GuardInterval::Long, 1000).unwrap()).unwrap();
    assert!(w7.len() < w0.len());
}

#[test]
fn generation_is_deterministic() {
    let cfg = PpduConfig::for_payload(4, Bandwidth::MHz20, GuardInterval::Short, 256).unwrap();
    let data = payload(256, 10);
    assert_eq!(generate_ppdu(&data, &cfg).unwrap(), generate_ppdu(&data, &cfg).unwrap());
}
