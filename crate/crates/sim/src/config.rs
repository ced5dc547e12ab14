//! Run configuration: a line-oriented `key = value` file with `[section]`
//! headers. Every run writes its resolved configuration back in the same
//! format, so an output directory always records how it was produced.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use wov_core::freqplan::{self, FrequencyPlan, LoConstraints};
use wov_core::impairments::{ChainConfig, OpticalMode, PaModel, ProbePoint};
use wov_core::phy::{Bandwidth, GuardInterval, PpduConfig};

use crate::error::{SimError, SimResult};
use crate::experiments::{default_rssi_grid, rssi_grid, DistanceVariant, LinkSetup};

#[derive(Debug, Clone, PartialEq)]
pub struct PpduSettings {
    pub mcs: u8,
    pub bandwidth: Bandwidth,
    pub guard_interval: GuardInterval,
    /// Payload bytes, FCS excluded.
    pub frame_len: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlanSettings {
    pub tx_channel: u32,
    pub rx_channel: u32,
    /// IF center for 20 MHz channels; `None` picks the largest feasible one.
    pub if_mhz: Option<f64>,
    /// IF center for 40 MHz channels.
    pub if_mhz_40: Option<f64>,
    pub frontend_bw_mhz: f64,
    pub enforce_lo_grid: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSettings {
    pub mcs: Vec<u8>,
    pub bandwidths: Vec<Bandwidth>,
    pub rssi_start_dbm: f64,
    pub rssi_stop_dbm: f64,
    pub rssi_step_db: f64,
    pub frames: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DistanceSettings {
    pub variants: Vec<DistanceVariant>,
    pub mcs: Vec<u8>,
    pub threshold: f64,
    pub frames: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProbeSettings {
    pub taps: Vec<ProbePoint>,
    pub frames: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub seed: u64,
    pub output_dir: Option<PathBuf>,
    pub ppdu: PpduSettings,
    pub plan: PlanSettings,
    /// Chain parameters; RF centers and LOs are taken from the plan.
    pub chain: ChainConfig,
    pub sweep: SweepSettings,
    pub distance: DistanceSettings,
    pub probe: ProbeSettings,
}

impl Default for RunConfig {
    fn default() -> Self {
        let grid = default_rssi_grid();
        Self {
            seed: 1,
            output_dir: None,
            ppdu: PpduSettings {
                mcs: 3,
                bandwidth: Bandwidth::MHz20,
                guard_interval: GuardInterval::Long,
                frame_len: 1000,
            },
            plan: PlanSettings {
                tx_channel: 1,
                rx_channel: 6,
                if_mhz: Some(37.0),
                if_mhz_40: None,
                frontend_bw_mhz: freqplan::DEFAULT_FRONTEND_BW_MHZ,
                enforce_lo_grid: true,
            },
            chain: ChainConfig::default(),
            sweep: SweepSettings {
                mcs: (0..8).collect(),
                bandwidths: Bandwidth::ALL.to_vec(),
                rssi_start_dbm: grid[0],
                rssi_stop_dbm: grid[grid.len() - 1],
                rssi_step_db: grid[1] - grid[0],
                frames: 1000,
            },
            distance: DistanceSettings {
                variants: DistanceVariant::defaults(),
                mcs: vec![0, 3, 7],
                threshold: 0.9,
                frames: 1000,
            },
            probe: ProbeSettings { taps: ProbePoint::ALL.to_vec(), frames: 20 },
        }
    }
}

macro_rules! chain_f64_fields {
    ($($f:ident),* $(,)?) => {
        const CHAIN_F64: &[&str] = &[$(stringify!($f)),*];
        fn chain_f64<'a>(c: &'a mut ChainConfig, key: &str) -> Option<&'a mut f64> {
            match key {
                $(stringify!($f) => Some(&mut c.$f),)*
                _ => None,
            }
        }
    };
}

chain_f64_fields!(
    tx_power_dbm,
    nic_tx_snr_db,
    nic_phase_noise_var,
    attenuator_db,
    mixer_conversion_loss_db,
    if_noise_dbm,
    rx_mixer_noise_dbm,
    lo_tx_offset_hz,
    lo_rx_offset_hz,
    phase_noise_var,
    pa_gain_db,
    pa_clip_backoff_db,
    led_bias,
    led_full_scale_dbm,
    distance_m,
    lens_gain_db,
    path_loss_ref_db,
    path_loss_ref_m,
    path_loss_exponent,
    pd_noise_floor_dbm,
    agc_target_power,
    nic_rx_noise_dbm,
    nic_rx_evm_db,
);

fn join<T>(items: &[T], f: impl Fn(&T) -> String) -> String {
    items.iter().map(f).collect::<Vec<_>>().join(",")
}

fn gi_name(gi: GuardInterval) -> &'static str {
    match gi {
        GuardInterval::Short => "short",
        GuardInterval::Long => "long",
    }
}

fn opt_f64(v: Option<f64>) -> String {
    v.map_or_else(|| "auto".to_string(), |x| x.to_string())
}

fn variant_name(v: &DistanceVariant) -> String {
    if v.lens {
        format!("{}+lens", v.pa_gain_db)
    } else {
        v.pa_gain_db.to_string()
    }
}

pub fn parse_bandwidth(s: &str) -> Option<Bandwidth> {
    s.trim().parse::<u32>().ok().and_then(Bandwidth::from_mhz)
}

pub fn parse_guard_interval(s: &str) -> Option<GuardInterval> {
    match s.trim() {
        "short" | "400" => Some(GuardInterval::Short),
        "long" | "800" => Some(GuardInterval::Long),
        _ => None,
    }
}

/// Comma-separated MCS indices; `a-b` ranges allowed.
pub fn parse_mcs_list(s: &str) -> Option<Vec<u8>> {
    let mut out = vec![];
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        if let Some((a, b)) = part.split_once('-') {
            let (a, b): (u8, u8) = (a.trim().parse().ok()?, b.trim().parse().ok()?);
            if a > b {
                return None;
            }
            out.extend(a..=b);
        } else {
            out.push(part.parse().ok()?);
        }
    }
    (!out.is_empty() && out.iter().all(|&m| m < 8)).then_some(out)
}

pub fn parse_taps(s: &str) -> Option<Vec<ProbePoint>> {
    let taps: Option<Vec<_>> = s
        .split(',')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(|p| {
            let mut c = p.chars();
            match (c.next(), c.next()) {
                (Some(ch), None) => ProbePoint::from_label(ch),
                _ => None,
            }
        })
        .collect();
    taps.filter(|t| !t.is_empty())
}

/// `0`, `20`, `20+lens` entries separated by commas.
pub fn parse_variants(s: &str) -> Option<Vec<DistanceVariant>> {
    let v: Option<Vec<_>> = s
        .split(',')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(|p| {
            let (pa, lens) = match p.strip_suffix("+lens") {
                Some(pa) => (pa, true),
                None => (p, false),
            };
            pa.trim().parse::<f64>().ok().map(|pa_gain_db| DistanceVariant { pa_gain_db, lens })
        })
        .collect();
    v.filter(|v| !v.is_empty())
}

fn parse_bool(s: &str) -> Option<bool> {
    match s {
        "true" | "yes" | "1" => Some(true),
        "false" | "no" | "0" => Some(false),
        _ => None,
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> SimResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| SimError::io(path, e))?;
        Self::parse(&text)
    }

    /// Parses a config file; keys not present keep their defaults.
    pub fn parse(text: &str) -> SimResult<Self> {
        let mut cfg = Self::default();
        let mut section = String::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: String| SimError::Config { line: i + 1, msg };
            if let Some(name) = line.strip_prefix('[') {
                section = name
                    .strip_suffix(']')
                    .ok_or_else(|| err("unterminated section header".into()))?
                    .trim()
                    .to_string();
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| err("expected key = value".into()))?;
            cfg.set(&section, key.trim(), value.trim()).map_err(err)?;
        }
        Ok(cfg)
    }

    /// Sets one `section.key`. Errors carry a human-readable reason.
    pub fn set(&mut self, section: &str, key: &str, value: &str) -> Result<(), String> {
        let bad = || format!("invalid value {value:?} for {section}.{key}");
        let num = || value.parse::<f64>().map_err(|_| bad());
        let int = || value.parse::<usize>().map_err(|_| bad());
        match (section, key) {
            ("run", "seed") => self.seed = value.parse().map_err(|_| bad())?,
            ("run", "output_dir") => {
                self.output_dir = (!value.is_empty()).then(|| PathBuf::from(value));
            }
            ("ppdu", "mcs") => {
                self.ppdu.mcs = value.parse().ok().filter(|m| *m < 8).ok_or_else(bad)?;
            }
            ("ppdu", "bandwidth_mhz") => self.ppdu.bandwidth = parse_bandwidth(value).ok_or_else(bad)?,
            ("ppdu", "guard_interval") => {
                self.ppdu.guard_interval = parse_guard_interval(value).ok_or_else(bad)?;
            }
            ("ppdu", "frame_len") => self.ppdu.frame_len = int()?,
            ("plan", "tx_channel") => self.plan.tx_channel = value.parse().map_err(|_| bad())?,
            ("plan", "rx_channel") => self.plan.rx_channel = value.parse().map_err(|_| bad())?,
            ("plan", "if_mhz") => self.plan.if_mhz = if value == "auto" { None } else { Some(num()?) },
            ("plan", "if_mhz_40") => self.plan.if_mhz_40 = if value == "auto" { None } else { Some(num()?) },
            ("plan", "frontend_bw_mhz") => self.plan.frontend_bw_mhz = num()?,
            ("plan", "enforce_lo_grid") => self.plan.enforce_lo_grid = parse_bool(value).ok_or_else(bad)?,
            ("chain", "pa_model") => {
                self.chain.pa_model = match value {
                    "hard" => PaModel::Hard,
                    "rapp" => PaModel::Rapp,
                    _ => return Err(bad()),
                }
            }
            ("chain", "optical_mode") => {
                self.chain.optical_mode = match value {
                    "baseband" => OpticalMode::Baseband,
                    "passband" => OpticalMode::IfPassband,
                    _ => return Err(bad()),
                }
            }
            ("chain", "led_clip") => self.chain.led_clip = parse_bool(value).ok_or_else(bad)?,
            ("chain", "lens") => self.chain.lens = parse_bool(value).ok_or_else(bad)?,
            ("chain", k) => *chain_f64(&mut self.chain, k).ok_or_else(|| format!("unknown key {section}.{key}"))? = num()?,
            ("sweep", "mcs") => self.sweep.mcs = parse_mcs_list(value).ok_or_else(bad)?,
            ("sweep", "bandwidths_mhz") => {
                let bws: Option<Vec<_>> = value.split(',').map(parse_bandwidth).collect();
                self.sweep.bandwidths = bws.filter(|b| !b.is_empty()).ok_or_else(bad)?;
            }
            ("sweep", "rssi_start_dbm") => self.sweep.rssi_start_dbm = num()?,
            ("sweep", "rssi_stop_dbm") => self.sweep.rssi_stop_dbm = num()?,
            ("sweep", "rssi_step_db") => self.sweep.rssi_step_db = num()?,
            ("sweep", "frames") => self.sweep.frames = int()?,
            ("distance", "variants") => self.distance.variants = parse_variants(value).ok_or_else(bad)?,
            ("distance", "mcs") => self.distance.mcs = parse_mcs_list(value).ok_or_else(bad)?,
            ("distance", "threshold") => self.distance.threshold = num()?,
            ("distance", "frames") => self.distance.frames = int()?,
            ("probe", "taps") => self.probe.taps = parse_taps(value).ok_or_else(bad)?,
            ("probe", "frames") => self.probe.frames = int()?,
            _ => return Err(format!("unknown key {section}.{key}")),
        }
        Ok(())
    }

    /// Serializes every setting; `parse(to_text())` reproduces `self`.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "[run]\nseed = {}", self.seed);
        if let Some(d) = &self.output_dir {
            let _ = writeln!(s, "output_dir = {}", d.display());
        }
        let p = &self.ppdu;
        let _ = writeln!(
            s,
            "\n[ppdu]\nmcs = {}\nbandwidth_mhz = {}\nguard_interval = {}\nframe_len = {}",
            p.mcs,
            p.bandwidth.mhz(),
            gi_name(p.guard_interval),
            p.frame_len
        );
        let p = &self.plan;
        let _ = writeln!(
            s,
            "\n[plan]\ntx_channel = {}\nrx_channel = {}\nif_mhz = {}\nif_mhz_40 = {}\nfrontend_bw_mhz = {}\nenforce_lo_grid = {}",
            p.tx_channel,
            p.rx_channel,
            opt_f64(p.if_mhz),
            opt_f64(p.if_mhz_40),
            p.frontend_bw_mhz,
            p.enforce_lo_grid
        );
        s.push_str("\n[chain]\n");
        let mut c = self.chain.clone();
        for k in CHAIN_F64 {
            let v = *chain_f64(&mut c, k).expect("listed field");
            let _ = writeln!(s, "{k} = {v}");
        }
        let _ = writeln!(
            s,
            "pa_model = {}\noptical_mode = {}\nled_clip = {}\nlens = {}",
            match c.pa_model {
                PaModel::Hard => "hard",
                PaModel::Rapp => "rapp",
            },
            match c.optical_mode {
                OpticalMode::Baseband => "baseband",
                OpticalMode::IfPassband => "passband",
            },
            c.led_clip,
            c.lens
        );
        let w = &self.sweep;
        let _ = writeln!(
            s,
            "\n[sweep]\nmcs = {}\nbandwidths_mhz = {}\nrssi_start_dbm = {}\nrssi_stop_dbm = {}\nrssi_step_db = {}\nframes = {}",
            join(&w.mcs, |m| m.to_string()),
            join(&w.bandwidths, |b| b.mhz().to_string()),
            w.rssi_start_dbm,
            w.rssi_stop_dbm,
            w.rssi_step_db,
            w.frames
        );
        let d = &self.distance;
        let _ = writeln!(
            s,
            "\n[distance]\nvariants = {}\nmcs = {}\nthreshold = {}\nframes = {}",
            join(&d.variants, variant_name),
            join(&d.mcs, |m| m.to_string()),
            d.threshold,
            d.frames
        );
        let _ = writeln!(
            s,
            "\n[probe]\ntaps = {}\nframes = {}",
            join(&self.probe.taps, |t| t.label().to_string()),
            self.probe.frames
        );
        s
    }

    pub fn lo_constraints(&self) -> LoConstraints {
        LoConstraints { enforce_grid: self.plan.enforce_lo_grid, ..LoConstraints::default() }
    }

    /// Frequency plan for a channel bandwidth.
    pub fn frequency_plan(&self, bandwidth: Bandwidth) -> SimResult<FrequencyPlan> {
        let target = match bandwidth {
            Bandwidth::MHz20 => self.plan.if_mhz,
            Bandwidth::MHz40 => self.plan.if_mhz_40,
        };
        Ok(freqplan::plan(
            self.plan.tx_channel,
            self.plan.rx_channel,
            bandwidth.mhz() as f64,
            self.plan.frontend_bw_mhz,
            target,
            &self.lo_constraints(),
        )?)
    }

    /// Chain configuration with the LOs of the plan for `bandwidth`.
    pub fn chain_for(&self, bandwidth: Bandwidth) -> SimResult<ChainConfig> {
        let chain = self.chain.clone().with_plan(&self.frequency_plan(bandwidth)?);
        chain.validate()?;
        Ok(chain)
    }

    pub fn ppdu_config(&self) -> SimResult<PpduConfig> {
        let p = &self.ppdu;
        Ok(PpduConfig::for_payload(p.mcs, p.bandwidth, p.guard_interval, p.frame_len)?)
    }

    pub fn rssi_grid(&self) -> SimResult<Vec<f64>> {
        let w = &self.sweep;
        let g = rssi_grid(w.rssi_start_dbm, w.rssi_stop_dbm, w.rssi_step_db);
        if g.is_empty() {
            return Err(SimError::Invalid(format!(
                "empty RSSI grid {}..{} step {}",
                w.rssi_start_dbm, w.rssi_stop_dbm, w.rssi_step_db
            )));
        }
        Ok(g)
    }

    pub fn link(&self, bandwidth: Bandwidth, n_frames: usize) -> LinkSetup {
        LinkSetup {
            bandwidth,
            guard_interval: self.ppdu.guard_interval,
            frame_len: self.ppdu.frame_len,
            n_frames,
            seed: self.seed,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_round_trip() {
        let c = RunConfig::default();
        assert_eq!(RunConfig::parse(&c.to_text()).unwrap(), c);
    }

    #[test]
    fn edited_round_trip() {
        let mut c = RunConfig { seed: 99, output_dir: Some("out/x".into()), ..RunConfig::default() };
        c.chain.pd_noise_floor_dbm = f64::NEG_INFINITY;
        c.chain.distance_m = 0.123456789;
        c.chain.pa_model = PaModel::Rapp;
        c.plan.if_mhz = None;
        c.distance.variants = vec![DistanceVariant { pa_gain_db: 5.5, lens: true }];
        c.probe.taps = vec![ProbePoint::C];
        assert_eq!(RunConfig::parse(&c.to_text()).unwrap(), c);
    }

    #[test]
    fn unknown_keys_and_bad_values_rejected() {
        assert!(matches!(RunConfig::parse("[chain]\nbogus = 1"), Err(SimError::Config { line: 2, .. })));
        assert!(RunConfig::parse("[ppdu]\nmcs = 9").is_err());
        assert!(RunConfig::parse("[chain]\nattenuator_db = lots").is_err());
        assert!(RunConfig::parse("[chain\n").is_err());
        let c = RunConfig::parse("# comment\n[chain]\nattenuator_db = 10 # trailing\n").unwrap();
        assert_eq!(c.chain.attenuator_db, 10.0);
    }

    #[test]
    fn list_parsers() {
        assert_eq!(parse_mcs_list("0-2,7"), Some(vec![0, 1, 2, 7]));
        assert_eq!(parse_mcs_list("8"), None);
        assert_eq!(parse_taps("a,B,e"), Some(vec![ProbePoint::A, ProbePoint::B, ProbePoint::E]));
        assert_eq!(parse_taps("F"), None);
        assert_eq!(
            parse_variants("0,20+lens"),
            Some(vec![
                DistanceVariant { pa_gain_db: 0.0, lens: false },
                DistanceVariant { pa_gain_db: 20.0, lens: true }
            ])
        );
    }

    #[test]
    fn default_plans_are_feasible() {
        let c = RunConfig::default();
        let p = c.frequency_plan(Bandwidth::MHz20).unwrap();
        assert_eq!((p.lo_tx_mhz, p.lo_rx_mhz), (2375.0, 2400.0));
        assert!(c.chain_for(Bandwidth::MHz40).is_ok());
    }
}
