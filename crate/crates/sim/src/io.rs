//! File formats: CSV tables, the probe-point report, raw I/Q captures.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use wov_core::impairments::ProbePoint;
use wov_core::{Complex64, Waveform};

use crate::error::{SimError, SimResult};
use crate::experiments::{DistanceResult, DistortionReport, FsrCurve};

/// Writes through a temporary file in the same directory and renames it
/// into place, so readers never see a partial file.
pub fn atomic_write(path: &Path, contents: &[u8]) -> SimResult<()> {
    let dir = path.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
    fs::create_dir_all(dir).map_err(|e| SimError::io(dir, e))?;
    let name = path.file_name().ok_or_else(|| SimError::Invalid(format!("not a file path: {}", path.display())))?;
    let tmp = dir.join(format!(".{}.tmp{}", name.to_string_lossy(), std::process::id()));
    fs::write(&tmp, contents).map_err(|e| SimError::io(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| {
        let _ = fs::remove_file(&tmp);
        SimError::io(path, e)
    })
}

pub const FSR_HEADER: &str = "mcs,bandwidth_mhz,rssi_dbm,n_frames,n_ok,fsr";
pub const DISTANCE_HEADER: &str = "pa_db,lens,mcs,max_distance_m";
pub const CONSTELLATION_HEADER: &str = "tap,i,q";

pub fn fsr_csv(curves: &[FsrCurve]) -> String {
    let mut s = String::from(FSR_HEADER);
    s.push('\n');
    for c in curves {
        for p in &c.points {
            let _ = writeln!(s, "{},{},{},{},{},{}", c.mcs, c.bandwidth.mhz(), p.rssi_dbm, p.n_frames, p.n_ok, p.fsr);
        }
    }
    s
}

pub fn distance_csv(results: &[DistanceResult]) -> String {
    let mut s = String::from(DISTANCE_HEADER);
    s.push('\n');
    for r in results {
        let _ = writeln!(s, "{},{},{},{:.2}", r.variant.pa_gain_db, r.variant.lens, r.mcs, r.max_distance_m);
    }
    s
}

/// One line per tap: point, power dBm, noise dBm, SNR dB, EVM %.
pub fn report_table(report: &DistortionReport) -> String {
    let mut s = String::from("# point  power_dbm  noise_dbm  snr_db  evm_percent\n");
    for r in &report.rows {
        let st = r.stats;
        let _ = write!(
            s,
            "{}  {:.2}  {:.2}  {:.2}  {:.2}",
            r.point.label(),
            st.rx_power_dbm,
            st.noise_dbm,
            st.snr_db,
            st.evm_percent
        );
        if r.predicted {
            s.push_str("  predicted");
        }
        s.push('\n');
    }
    s
}

pub fn constellation_csv(points: &[(ProbePoint, Vec<Complex64>)]) -> String {
    let mut s = String::from(CONSTELLATION_HEADER);
    s.push('\n');
    for (tap, pts) in points {
        for p in pts {
            let _ = writeln!(s, "{},{:.6},{:.6}", tap.label(), p.re, p.im);
        }
    }
    s
}

/// `tap,subcarrier,power_dbm`, subcarriers numbered from the lowest data tone.
pub fn subcarrier_power_csv(power: &[(ProbePoint, Vec<f64>)]) -> String {
    let mut s = String::from("tap,subcarrier,power_dbm\n");
    for (tap, p) in power {
        for (k, v) in p.iter().enumerate() {
            let _ = writeln!(s, "{},{},{:.3}", tap.label(), k, v);
        }
    }
    s
}

/// Path of the text header that accompanies a raw I/Q file.
pub fn sidecar_path(path: &Path) -> PathBuf {
    let mut p = path.as_os_str().to_owned();
    p.push(".hdr");
    PathBuf::from(p)
}

/// Raw interleaved little-endian float32 I/Q plus a `key=value` sidecar
/// carrying the sample rate and power reference.
pub fn write_iq(path: &Path, w: &Waveform) -> SimResult<()> {
    let mut raw = Vec::with_capacity(w.samples.len() * 8);
    for s in &w.samples {
        raw.extend_from_slice(&(s.re as f32).to_le_bytes());
        raw.extend_from_slice(&(s.im as f32).to_le_bytes());
    }
    let mut hdr = format!(
        "format=cf32_le\nsample_rate_hz={}\nref_power_dbm={}\ncenter_hz={}\nn_samples={}\n",
        w.sample_rate,
        w.ref_power_dbm,
        w.center_hz,
        w.samples.len()
    );
    if let Some(d) = w.data_start {
        let _ = writeln!(hdr, "data_start={d}");
    }
    atomic_write(path, &raw)?;
    atomic_write(&sidecar_path(path), hdr.as_bytes())
}

pub fn read_iq(path: &Path) -> SimResult<Waveform> {
    let hdr_path = sidecar_path(path);
    let hdr = fs::read_to_string(&hdr_path).map_err(|e| SimError::io(&hdr_path, e))?;
    let (mut rate, mut ref_dbm, mut center, mut n, mut data_start) = (None, None, 0.0, None, None);
    for (i, line) in hdr.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let bad = |msg: &str| SimError::Config { line: i + 1, msg: format!("{}: {msg}", hdr_path.display()) };
        let (k, v) = line.split_once('=').ok_or_else(|| bad("expected key=value"))?;
        let num = |v: &str| v.trim().parse::<f64>().map_err(|_| bad("not a number"));
        match k.trim() {
            "format" if v.trim() == "cf32_le" => {}
            "format" => return Err(bad("unsupported sample format")),
            "sample_rate_hz" => rate = Some(num(v)?),
            "ref_power_dbm" => ref_dbm = Some(num(v)?),
            "center_hz" => center = num(v)?,
            "n_samples" => n = Some(v.trim().parse::<usize>().map_err(|_| bad("not an integer"))?),
            "data_start" => data_start = Some(v.trim().parse::<usize>().map_err(|_| bad("not an integer"))?),
            _ => {}
        }
    }
    let missing = |k: &str| SimError::Invalid(format!("{}: missing {k}", hdr_path.display()));
    let rate = rate.ok_or_else(|| missing("sample_rate_hz"))?;
    let ref_dbm = ref_dbm.ok_or_else(|| missing("ref_power_dbm"))?;
    let raw = fs::read(path).map_err(|e| SimError::io(path, e))?;
    if raw.len() % 8 != 0 {
        return Err(SimError::Invalid(format!("{}: length not a multiple of 8 bytes", path.display())));
    }
    let samples: Vec<Complex64> = raw
        .chunks_exact(8)
        .map(|c| {
            let re = f32::from_le_bytes([c[0], c[1], c[2], c[3]]);
            let im = f32::from_le_bytes([c[4], c[5], c[6], c[7]]);
            Complex64::new(re as f64, im as f64)
        })
        .collect();
    if let Some(n) = n {
        if n != samples.len() {
            return Err(SimError::Invalid(format!(
                "{}: header says {n} samples, file has {}",
                path.display(),
                samples.len()
            )));
        }
    }
    let mut w = Waveform::new(samples, rate, ref_dbm)?;
    w.center_hz = center;
    w.data_start = data_start;
    Ok(w)
}
