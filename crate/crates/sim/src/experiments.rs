//! Monte-Carlo drivers: FSR-vs-RSSI sweeps, maximum distance search, the
//! probe-point distortion report and the modem loopback self-test.

use rayon::prelude::*;
use wov_core::impairments::{
    probe_measure, run_chain, ChainConfig, ProbeCapture, ProbePoint, ProbeReference, ProbeStats,
};
use wov_core::noise::{mix_seed, rand_bytes, rng_from_seed};
use wov_core::phy::{generate_ppdu, receive_ppdu, Bandwidth, GuardInterval, PpduConfig};
use wov_core::{Complex64, Error};

use crate::error::{SimError, SimResult};

/// Closest distance the distance search considers, m.
pub const MIN_DISTANCE_M: f64 = 0.05;
/// Closest LED-to-photodiode spacing an RSSI target may resolve to, m.
pub const MIN_LINK_DISTANCE_M: f64 = 0.01;
/// Search stops growing the distance beyond this, m.
pub const MAX_DISTANCE_M: f64 = 200.0;
pub const DISTANCE_TOLERANCE_M: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FsrPoint {
    pub rssi_dbm: f64,
    pub n_frames: usize,
    pub n_ok: usize,
    pub fsr: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FsrCurve {
    pub mcs: u8,
    pub bandwidth: Bandwidth,
    /// Sorted by RSSI.
    pub points: Vec<FsrPoint>,
    pub seed: u64,
}

impl FsrCurve {
    /// Lowest RSSI at which the curve reaches `level`, linearly interpolated
    /// between grid points. `None` if it never does.
    pub fn crossing(&self, level: f64) -> Option<f64> {
        let i = self.points.iter().position(|p| p.fsr >= level)?;
        if i == 0 {
            return Some(self.points[0].rssi_dbm);
        }
        let (a, b) = (self.points[i - 1], self.points[i]);
        let t = (level - a.fsr) / (b.fsr - a.fsr);
        Some(a.rssi_dbm + t * (b.rssi_dbm - a.rssi_dbm))
    }
}

/// Link and Monte-Carlo settings shared by the experiments.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkSetup {
    pub bandwidth: Bandwidth,
    pub guard_interval: GuardInterval,
    /// Payload bytes per frame, FCS excluded.
    pub frame_len: usize,
    pub n_frames: usize,
    pub seed: u64,
}

impl Default for LinkSetup {
    fn default() -> Self {
        Self {
            bandwidth: Bandwidth::MHz20,
            guard_interval: GuardInterval::Long,
            frame_len: 1000,
            n_frames: 1000,
            seed: 1,
        }
    }
}

/// The RSSI grid used for the FSR figures: -60 to -20 dBm in 2.5 dB steps.
pub fn default_rssi_grid() -> Vec<f64> {
    rssi_grid(-60.0, -20.0, 2.5)
}

pub fn rssi_grid(start: f64, stop: f64, step: f64) -> Vec<f64> {
    if !(step > 0.0) || stop < start {
        return vec![];
    }
    let n = ((stop - start) / step + 1e-9).floor() as usize;
    (0..=n).map(|i| start + i as f64 * step).collect()
}

/// Pre-AGC received power for the chain's NIC output at `distance_m`.
pub fn rssi_from_distance(distance_m: f64, cfg: &ChainConfig) -> SimResult<f64> {
    Ok(ChainConfig { distance_m, ..cfg.clone() }.nominal_rssi_dbm()?)
}

/// Distance at which the chain delivers `rssi_dbm` to the receiving NIC.
///
/// Close to the LED the distance law is extrapolated, so the link may
/// show net gain; RSSIs that would need a spacing below
/// [`MIN_LINK_DISTANCE_M`] are rejected.
pub fn distance_for_rssi(rssi_dbm: f64, cfg: &ChainConfig) -> SimResult<f64> {
    let at_ref = rssi_from_distance(cfg.path_loss_ref_m, &ChainConfig { lens: false, ..cfg.clone() })?;
    let path_loss = at_ref + cfg.path_loss_ref_db - rssi_dbm;
    let lens = if cfg.lens { cfg.lens_gain_db } else { 0.0 };
    let d = cfg.path_loss_ref_m * 10f64.powf((path_loss - cfg.path_loss_ref_db + lens) / (10.0 * cfg.path_loss_exponent));
    if !(d >= MIN_LINK_DISTANCE_M) {
        let bound = rssi_from_distance(MIN_LINK_DISTANCE_M, cfg)?;
        return Err(SimError::Invalid(format!(
            "RSSI {rssi_dbm} dBm exceeds the {bound:.2} dBm reachable at the minimum LED-to-photodiode spacing"
        )));
    }
    Ok(d)
}

/// Sends one random frame through the chain and reports whether it arrived
/// with a valid FCS. A frame the receiver cannot find counts as lost.
pub fn frame_trial(ppdu: &PpduConfig, cfg: &ChainConfig, trial_seed: u64) -> SimResult<bool> {
    let payload = rand_bytes(&mut rng_from_seed(trial_seed), ppdu.payload_length());
    let tx = generate_ppdu(&payload, ppdu)?;
    let out = run_chain(&tx, cfg, &[], mix_seed(trial_seed, 1), None)?;
    match receive_ppdu(&out.rx, ppdu) {
        Ok(rx) => Ok(rx.stats.fcs_ok && rx.payload == payload),
        Err(Error::SyncNotFound) => Ok(false),
        Err(e) => Err(e.into()),
    }
}

fn count_ok(ppdu: &PpduConfig, cfg: &ChainConfig, n_frames: usize, seed: impl Fn(usize) -> u64 + Sync) -> SimResult<usize> {
    (0..n_frames)
        .into_par_iter()
        .map(|f| frame_trial(ppdu, cfg, seed(f)).map(usize::from))
        .try_reduce(|| 0, |a, b| Ok(a + b))
}

/// Frame success rate versus RSSI for each MCS.
///
/// For every grid point the distance is solved so the nominal pre-AGC
/// power equals the target. Trial seeds depend only on (seed, MCS, RSSI
/// index, frame index), so results do not depend on scheduling.
pub fn fsr_sweep(mcs_set: &[u8], rssi_grid: &[f64], link: &LinkSetup, cfg: &ChainConfig) -> SimResult<Vec<FsrCurve>> {
    if link.n_frames == 0 {
        return Err(SimError::Invalid("n_frames must be >= 1".into()));
    }
    if rssi_grid.is_empty() {
        return Err(SimError::Invalid("RSSI grid is empty".into()));
    }
    let mut grid: Vec<(usize, f64)> = rssi_grid.iter().copied().enumerate().collect();
    grid.sort_by(|a, b| a.1.total_cmp(&b.1));
    let mut curves = Vec::with_capacity(mcs_set.len());
    for &mcs in mcs_set {
        let ppdu = PpduConfig::for_payload(mcs, link.bandwidth, link.guard_interval, link.frame_len)?;
        let mut points = Vec::with_capacity(grid.len());
        for &(idx, rssi) in &grid {
            let at = ChainConfig { distance_m: distance_for_rssi(rssi, cfg)?, ..cfg.clone() };
            let base = mix_seed(mix_seed(link.seed, mcs as u64), idx as u64);
            let n_ok = count_ok(&ppdu, &at, link.n_frames, |f| mix_seed(base, f as u64))?;
            points.push(FsrPoint {
                rssi_dbm: rssi,
                n_frames: link.n_frames,
                n_ok,
                fsr: n_ok as f64 / link.n_frames as f64,
            });
        }
        curves.push(FsrCurve { mcs, bandwidth: link.bandwidth, points, seed: link.seed });
    }
    Ok(curves)
}

/// Chain variant for the distance search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistanceVariant {
    pub pa_gain_db: f64,
    pub lens: bool,
}

impl DistanceVariant {
    /// No PA; +20 dB PA; +20 dB PA with lens.
    pub fn defaults() -> Vec<Self> {
        vec![
            Self { pa_gain_db: 0.0, lens: false },
            Self { pa_gain_db: 20.0, lens: false },
            Self { pa_gain_db: 20.0, lens: true },
        ]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DistanceResult {
    pub variant: DistanceVariant,
    pub mcs: u8,
    /// Zero when the threshold is missed even at [`MIN_DISTANCE_M`].
    pub max_distance_m: f64,
    pub fsr_threshold: f64,
    pub reachable: bool,
    pub fsr_at_max: f64,
    /// FSR at 1.1 times the maximum distance.
    pub fsr_beyond: f64,
}

/// FSR at one distance, with the same trial seeds at every distance so the
/// search sees a smooth curve.
pub fn fsr_at_distance(ppdu: &PpduConfig, cfg: &ChainConfig, distance_m: f64, link: &LinkSetup) -> SimResult<f64> {
    let at = ChainConfig { distance_m, ..cfg.clone() };
    let base = mix_seed(link.seed, ppdu.mcs.index as u64);
    let n_ok = count_ok(ppdu, &at, link.n_frames, |f| mix_seed(base, f as u64))?;
    Ok(n_ok as f64 / link.n_frames as f64)
}

/// Largest distance at which the FSR stays at or above `threshold`, found
/// by doubling and then bisection to [`DISTANCE_TOLERANCE_M`].
pub fn max_distance(
    variants: &[DistanceVariant],
    mcs_set: &[u8],
    threshold: f64,
    link: &LinkSetup,
    cfg: &ChainConfig,
) -> SimResult<Vec<DistanceResult>> {
    if !(threshold > 0.0 && threshold <= 1.0) {
        return Err(SimError::Invalid("FSR threshold must be in (0, 1]".into()));
    }
    let mut out = vec![];
    for v in variants {
        let vcfg = ChainConfig { pa_gain_db: v.pa_gain_db, lens: v.lens, ..cfg.clone() };
        for &mcs in mcs_set {
            let ppdu = PpduConfig::for_payload(mcs, link.bandwidth, link.guard_interval, link.frame_len)?;
            let fsr = |d: f64| fsr_at_distance(&ppdu, &vcfg, d, link);
            let first = fsr(MIN_DISTANCE_M)?;
            if first < threshold {
                out.push(DistanceResult {
                    variant: *v,
                    mcs,
                    max_distance_m: 0.0,
                    fsr_threshold: threshold,
                    reachable: false,
                    fsr_at_max: first,
                    fsr_beyond: first,
                });
                continue;
            }
            let (mut lo, mut lo_fsr) = (MIN_DISTANCE_M, first);
            let mut hi = 2.0 * lo;
            loop {
                let f = fsr(hi)?;
                if f < threshold || hi >= MAX_DISTANCE_M {
                    if f >= threshold {
                        lo = hi;
                        lo_fsr = f;
                    }
                    break;
                }
                lo = hi;
                lo_fsr = f;
                hi *= 2.0;
            }
            while hi - lo > DISTANCE_TOLERANCE_M {
                let mid = 0.5 * (lo + hi);
                let f = fsr(mid)?;
                if f >= threshold {
                    lo = mid;
                    lo_fsr = f;
                } else {
                    hi = mid;
                }
            }
            out.push(DistanceResult {
                variant: *v,
                mcs,
                max_distance_m: lo,
                fsr_threshold: threshold,
                reachable: true,
                fsr_at_max: lo_fsr,
                fsr_beyond: fsr(1.1 * lo)?,
            });
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub point: ProbePoint,
    /// Mean over the report frames.
    pub stats: ProbeStats,
    pub predicted: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DistortionReport {
    pub rows: Vec<ReportRow>,
    /// Equalized data symbols of the first frame per tap.
    pub constellations: Vec<(ProbePoint, Vec<Complex64>)>,
    /// Per data-subcarrier power of the first frame per tap, dBm.
    pub subcarrier_power: Vec<(ProbePoint, Vec<f64>)>,
    /// Raw captures of the first frame.
    pub captures: Vec<ProbeCapture>,
}

/// Runs `n_frames` tapped chain passes and tabulates the probe statistics.
pub fn distortion_report(
    cfg: &ChainConfig,
    ppdu: &PpduConfig,
    taps: &[ProbePoint],
    n_frames: usize,
    seed: u64,
) -> SimResult<DistortionReport> {
    if n_frames == 0 {
        return Err(SimError::Invalid("n_frames must be >= 1".into()));
    }
    let mut taps = taps.to_vec();
    taps.sort();
    taps.dedup();
    let mut sums = vec![[0.0f64; 4]; taps.len()];
    let mut report = DistortionReport { rows: vec![], constellations: vec![], subcarrier_power: vec![], captures: vec![] };
    for f in 0..n_frames {
        let trial = mix_seed(seed, f as u64);
        let payload = rand_bytes(&mut rng_from_seed(trial), ppdu.payload_length());
        let reference = ProbeReference::new(&payload, ppdu)?;
        let out = run_chain(&reference.ppdu, cfg, &taps, mix_seed(trial, 1), None)?;
        for (i, cap) in out.captures.iter().enumerate() {
            let m = probe_measure(&cap.waveform, &reference)?;
            let s = m.stats;
            for (acc, v) in sums[i].iter_mut().zip([s.rx_power_dbm, s.noise_dbm, s.snr_db, s.evm_percent]) {
                *acc += v;
            }
            if f == 0 {
                report.constellations.push((cap.point, m.points));
                report.subcarrier_power.push((cap.point, m.subcarrier_power_dbm));
            }
        }
        if f == 0 {
            report.captures = out.captures;
        }
    }
    let n = n_frames as f64;
    report.rows = taps
        .iter()
        .zip(&sums)
        .map(|(&point, s)| ReportRow {
            point,
            stats: ProbeStats {
                rx_power_dbm: s[0] / n,
                noise_dbm: s[1] / n,
                snr_db: s[2] / n,
                evm_percent: s[3] / n,
            },
            predicted: point == ProbePoint::C,
        })
        .collect();
    for (row, cap) in report.rows.iter().zip(report.captures.iter_mut()) {
        cap.stats = Some(row.stats);
    }
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LoopbackResult {
    pub mcs: u8,
    pub bandwidth: Bandwidth,
    pub guard_interval: GuardInterval,
    pub n_frames: usize,
    pub n_ok: usize,
}

/// Modem self-test without impairments: every MCS, bandwidth and guard
/// interval, `n_frames` random frames each.
pub fn loopback(n_frames: usize, frame_len: usize, seed: u64) -> SimResult<Vec<LoopbackResult>> {
    let mut cases = vec![];
    for bw in Bandwidth::ALL {
        for gi in GuardInterval::ALL {
            for mcs in 0..8u8 {
                cases.push((mcs, bw, gi));
            }
        }
    }
    cases
        .into_par_iter()
        .map(|(mcs, bw, gi)| {
            let ppdu = PpduConfig::for_payload(mcs, bw, gi, frame_len)?;
            let mut n_ok = 0;
            for f in 0..n_frames {
                let trial = mix_seed(mix_seed(seed, (mcs as u64) << 8 | bw.mhz() as u64), f as u64 * 2 + gi as u64);
                let payload = rand_bytes(&mut rng_from_seed(trial), frame_len);
                let rx = receive_ppdu(&generate_ppdu(&payload, &ppdu)?, &ppdu)?;
                n_ok += usize::from(rx.stats.fcs_ok && rx.payload == payload);
            }
            Ok(LoopbackResult { mcs, bandwidth: bw, guard_interval: gi, n_frames, n_ok })
        })
        .collect()
}
