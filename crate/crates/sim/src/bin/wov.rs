use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use wov_core::freqplan::{self, FrequencyPlan};
use wov_sim::config::{parse_bandwidth, parse_mcs_list, parse_taps, parse_variants, RunConfig};
use wov_sim::experiments::{distortion_report, fsr_sweep, loopback, max_distance};
use wov_sim::io;
use wov_sim::SimError;

/// Default output directory when neither `--out` nor the config sets one.
const OUT_ENV: &str = "WOV_OUTPUT_DIR";
const EFFECTIVE_CONFIG: &str = "effective.conf";

#[derive(Parser)]
#[command(name = "wov", version, about = "WiFi-over-VLC link simulator")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct Common {
    /// Run configuration file (key = value with [section] headers).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Master seed for every random draw.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Frames per Monte-Carlo point.
    #[arg(long, global = true)]
    frames: Option<usize>,
    /// Output directory [default: $WOV_OUTPUT_DIR, else ./wov-out].
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Compute and check the LO plan for a TX/RX channel pair.
    FreqPlan {
        /// 2.4 GHz WiFi channel of the transmitting NIC.
        #[arg(long)]
        tx_channel: Option<u32>,
        /// 2.4 GHz WiFi channel of the receiving NIC.
        #[arg(long)]
        rx_channel: Option<u32>,
        /// Channel bandwidth in MHz (20 or 40).
        #[arg(long)]
        bw: Option<f64>,
        /// Front-end passband in MHz.
        #[arg(long)]
        frontend_bw: Option<f64>,
        /// IF center in MHz, or "auto".
        #[arg(long = "if")]
        if_mhz: Option<String>,
        /// Accept LOs off the synthesizer step grid.
        #[arg(long)]
        no_grid: bool,
        /// Also print the plan as key=value lines.
        #[arg(long)]
        kv: bool,
    },
    /// FSR versus RSSI for each MCS; writes fsr.csv.
    Sweep {
        /// MCS list, e.g. "0-7" or "0,3,7".
        #[arg(long)]
        mcs: Option<String>,
        /// Bandwidths in MHz, e.g. "20,40".
        #[arg(long)]
        bw: Option<String>,
        /// First grid point, dBm.
        #[arg(long, allow_hyphen_values = true)]
        rssi_start: Option<f64>,
        /// Last grid point, dBm.
        #[arg(long, allow_hyphen_values = true)]
        rssi_stop: Option<f64>,
        /// Grid step, dB.
        #[arg(long)]
        rssi_step: Option<f64>,
        /// Payload bytes per frame.
        #[arg(long)]
        frame_len: Option<usize>,
    },
    /// Maximum distance per chain variant and MCS; writes distance.csv.
    Distance {
        /// MCS list, e.g. "0,3,7".
        #[arg(long)]
        mcs: Option<String>,
        /// Variants as PA gain in dB, "+lens" suffix for the lens, e.g. "0,20,20+lens".
        #[arg(long)]
        variants: Option<String>,
        /// FSR a distance must sustain.
        #[arg(long)]
        threshold: Option<f64>,
    },
    /// Probe-point statistics, constellations and I/Q captures.
    Probe {
        /// Taps, e.g. "A,B,D,E".
        #[arg(long)]
        taps: Option<String>,
        /// MCS index of the probe frames.
        #[arg(long)]
        mcs: Option<u8>,
        /// LED-to-photodiode distance, m.
        #[arg(long)]
        distance: Option<f64>,
    },
    /// Modem self-test without impairments over every MCS, bandwidth and GI.
    Loopback {
        /// Payload bytes per frame.
        #[arg(long)]
        frame_len: Option<usize>,
    },
}

enum Failure {
    Usage(String),
    Infeasible(String),
    Internal(String),
}

impl From<SimError> for Failure {
    fn from(e: SimError) -> Self {
        match e {
            SimError::Config { .. } => Failure::Usage(e.to_string()),
            e if e.is_infeasible() => Failure::Infeasible(e.to_string()),
            e => Failure::Internal(e.to_string()),
        }
    }
}

type CmdResult = Result<(), Failure>;

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Infeasible(m)) => {
            eprintln!("infeasible: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Internal(m)) => {
            eprintln!("internal error: {m}");
            ExitCode::from(3)
        }
    }
}

fn run(cli: Cli) -> CmdResult {
    let mut cfg = match &cli.common.config {
        Some(p) => RunConfig::load(p).map_err(|e| usage(e.to_string()))?,
        None => RunConfig::default(),
    };
    if let Some(s) = cli.common.seed {
        cfg.seed = s;
    }
    if let Some(out) = &cli.common.out {
        cfg.output_dir = Some(out.clone());
    }
    let frames = cli.common.frames;
    if frames == Some(0) {
        return Err(usage("--frames must be at least 1"));
    }
    match cli.cmd {
        Cmd::FreqPlan { tx_channel, rx_channel, bw, frontend_bw, if_mhz, no_grid, kv } => {
            let p = &mut cfg.plan;
            p.tx_channel = tx_channel.unwrap_or(p.tx_channel);
            p.rx_channel = rx_channel.unwrap_or(p.rx_channel);
            p.frontend_bw_mhz = frontend_bw.unwrap_or(p.frontend_bw_mhz);
            p.enforce_lo_grid &= !no_grid;
            let bw = bw.unwrap_or(cfg.ppdu.bandwidth.mhz() as f64);
            let target = match if_mhz.as_deref() {
                Some("auto") => None,
                Some(v) => Some(v.parse::<f64>().map_err(|_| usage(format!("invalid --if {v:?}")))?),
                None if bw == 40.0 => cfg.plan.if_mhz_40,
                None => cfg.plan.if_mhz,
            };
            cmd_freq_plan(&cfg, bw, target, kv)
        }
        Cmd::Sweep { mcs, bw, rssi_start, rssi_stop, rssi_step, frame_len } => {
            let s = &mut cfg.sweep;
            if let Some(m) = mcs {
                s.mcs = parse_mcs_list(&m).ok_or_else(|| usage(format!("invalid --mcs {m:?}")))?;
            }
            if let Some(b) = bw {
                let bws: Option<Vec<_>> = b.split(',').map(parse_bandwidth).collect();
                s.bandwidths = bws.filter(|v| !v.is_empty()).ok_or_else(|| usage(format!("invalid --bw {b:?}")))?;
            }
            s.rssi_start_dbm = rssi_start.unwrap_or(s.rssi_start_dbm);
            s.rssi_stop_dbm = rssi_stop.unwrap_or(s.rssi_stop_dbm);
            s.rssi_step_db = rssi_step.unwrap_or(s.rssi_step_db);
            s.frames = frames.unwrap_or(s.frames);
            cfg.ppdu.frame_len = frame_len.unwrap_or(cfg.ppdu.frame_len);
            cmd_sweep(&cfg)
        }
        Cmd::Distance { mcs, variants, threshold } => {
            let d = &mut cfg.distance;
            if let Some(m) = mcs {
                d.mcs = parse_mcs_list(&m).ok_or_else(|| usage(format!("invalid --mcs {m:?}")))?;
            }
            if let Some(v) = variants {
                d.variants = parse_variants(&v).ok_or_else(|| usage(format!("invalid --variants {v:?}")))?;
            }
            d.threshold = threshold.unwrap_or(d.threshold);
            d.frames = frames.unwrap_or(d.frames);
            cmd_distance(&cfg)
        }
        Cmd::Probe { taps, mcs, distance } => {
            if let Some(t) = taps {
                cfg.probe.taps = parse_taps(&t).ok_or_else(|| usage(format!("invalid --taps {t:?}")))?;
            }
            if let Some(m) = mcs {
                if m > 7 {
                    return Err(usage(format!("invalid --mcs {m}")));
                }
                cfg.ppdu.mcs = m;
            }
            cfg.chain.distance_m = distance.unwrap_or(cfg.chain.distance_m);
            cfg.probe.frames = frames.unwrap_or(cfg.probe.frames);
            cmd_probe(&cfg)
        }
        Cmd::Loopback { frame_len } => {
            cfg.ppdu.frame_len = frame_len.unwrap_or(cfg.ppdu.frame_len);
            cmd_loopback(&cfg, frames.unwrap_or(100))
        }
    }
}

fn output_dir(cfg: &RunConfig) -> PathBuf {
    cfg.output_dir
        .clone()
        .or_else(|| std::env::var_os(OUT_ENV).filter(|v| !v.is_empty()).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("wov-out"))
}

/// Writes the effective config first so even a failed run leaves a record.
fn prepare_output(cfg: &RunConfig) -> Result<PathBuf, Failure> {
    let dir = output_dir(cfg);
    let mut effective = cfg.clone();
    effective.output_dir = Some(dir.clone());
    io::atomic_write(&dir.join(EFFECTIVE_CONFIG), effective.to_text().as_bytes())?;
    Ok(dir)
}

fn write(dir: &Path, name: &str, contents: &str) -> CmdResult {
    io::atomic_write(&dir.join(name), contents.as_bytes())?;
    Ok(())
}

fn print_plan(p: &FrequencyPlan) {
    let half = p.channel_bw_mhz / 2.0;
    println!("channel bandwidth  {} MHz", p.channel_bw_mhz);
    println!("TX channel         {} ({} MHz)", p.wifi_channel_tx, p.channel_center_tx_mhz);
    println!("RX channel         {} ({} MHz)", p.wifi_channel_rx, p.channel_center_rx_mhz);
    println!("LO TX              {} MHz", p.lo_tx_mhz);
    println!("LO RX              {} MHz", p.lo_rx_mhz);
    println!("IF center          {} MHz", p.if_center_mhz);
    println!(
        "IF band            {} .. {} MHz (front-end 0 .. {} MHz)",
        p.if_center_mhz - half,
        p.if_center_mhz + half,
        p.frontend_bw_mhz
    );
}

fn print_plan_kv(p: &FrequencyPlan) {
    println!("channel_bw_mhz={}", p.channel_bw_mhz);
    println!("tx_channel={}", p.wifi_channel_tx);
    println!("rx_channel={}", p.wifi_channel_rx);
    println!("rf_tx_mhz={}", p.channel_center_tx_mhz);
    println!("rf_rx_mhz={}", p.channel_center_rx_mhz);
    println!("lo_tx_mhz={}", p.lo_tx_mhz);
    println!("lo_rx_mhz={}", p.lo_rx_mhz);
    println!("if_mhz={}", p.if_center_mhz);
    println!("frontend_bw_mhz={}", p.frontend_bw_mhz);
}

fn cmd_freq_plan(cfg: &RunConfig, bw: f64, target_if: Option<f64>, kv: bool) -> CmdResult {
    let p = &cfg.plan;
    match freqplan::plan(p.tx_channel, p.rx_channel, bw, p.frontend_bw_mhz, target_if, &cfg.lo_constraints()) {
        Ok(plan) => {
            print_plan(&plan);
            if kv {
                println!();
                print_plan_kv(&plan);
            }
            Ok(())
        }
        Err(wov_core::Error::FrequencyPlan(violations)) => {
            let lines: Vec<String> = violations.iter().map(|v| format!("  {v}")).collect();
            Err(Failure::Infeasible(format!("no valid frequency plan\n{}", lines.join("\n"))))
        }
        Err(e) => Err(SimError::from(e).into()),
    }
}

fn cmd_sweep(cfg: &RunConfig) -> CmdResult {
    let grid = cfg.rssi_grid()?;
    let dir = prepare_output(cfg)?;
    let start = Instant::now();
    let mut curves = vec![];
    for &bw in &cfg.sweep.bandwidths {
        let chain = cfg.chain_for(bw)?;
        let c = fsr_sweep(&cfg.sweep.mcs, &grid, &cfg.link(bw, cfg.sweep.frames), &chain)?;
        for curve in &c {
            let x = curve.crossing(0.5).map_or("not reached".to_string(), |r| format!("{r:.1} dBm"));
            println!("MCS {} {} MHz: FSR 0.5 at {x}", curve.mcs, bw.mhz());
        }
        curves.extend(c);
    }
    write(&dir, "fsr.csv", &io::fsr_csv(&curves))?;
    eprintln!("wrote {} ({:.1} s)", dir.join("fsr.csv").display(), start.elapsed().as_secs_f64());
    Ok(())
}

fn cmd_distance(cfg: &RunConfig) -> CmdResult {
    let dir = prepare_output(cfg)?;
    let bw = cfg.ppdu.bandwidth;
    let chain = cfg.chain_for(bw)?;
    let d = &cfg.distance;
    let results = max_distance(&d.variants, &d.mcs, d.threshold, &cfg.link(bw, d.frames), &chain)?;
    for r in &results {
        let what = if r.reachable { format!("{:.2} m", r.max_distance_m) } else { "unreachable".into() };
        println!(
            "PA {:+} dB{} MCS {}: {what}",
            r.variant.pa_gain_db,
            if r.variant.lens { " + lens" } else { "" },
            r.mcs
        );
    }
    write(&dir, "distance.csv", &io::distance_csv(&results))
}

fn cmd_probe(cfg: &RunConfig) -> CmdResult {
    let dir = prepare_output(cfg)?;
    let ppdu = cfg.ppdu_config()?;
    let chain = cfg.chain_for(ppdu.bandwidth)?;
    let report = distortion_report(&chain, &ppdu, &cfg.probe.taps, cfg.probe.frames, cfg.seed)?;
    let table = io::report_table(&report);
    print!("{table}");
    write(&dir, "probe_stats.txt", &table)?;
    write(&dir, "constellation.csv", &io::constellation_csv(&report.constellations))?;
    write(&dir, "subcarrier_power.csv", &io::subcarrier_power_csv(&report.subcarrier_power))?;
    for cap in &report.captures {
        io::write_iq(&dir.join(format!("tap_{}.cf32", cap.point.label())), &cap.waveform)?;
    }
    Ok(())
}

fn cmd_loopback(cfg: &RunConfig, frames: usize) -> CmdResult {
    let dir = prepare_output(cfg)?;
    let start = Instant::now();
    let results = loopback(frames, cfg.ppdu.frame_len, cfg.seed)?;
    let mut csv = String::from("mcs,bandwidth_mhz,guard_interval,n_frames,n_ok,fsr\n");
    let mut all_ok = true;
    for r in &results {
        let fsr = r.n_ok as f64 / r.n_frames as f64;
        all_ok &= r.n_ok == r.n_frames;
        let gi = match r.guard_interval {
            wov_core::phy::GuardInterval::Short => "short",
            wov_core::phy::GuardInterval::Long => "long",
        };
        println!("MCS {} {:>2} MHz {:>5} GI: FSR {fsr:.3}", r.mcs, r.bandwidth.mhz(), gi);
        csv.push_str(&format!("{},{},{gi},{},{},{fsr}\n", r.mcs, r.bandwidth.mhz(), r.n_frames, r.n_ok));
    }
    write(&dir, "loopback.csv", &csv)?;
    eprintln!("loopback finished in {:.1} s", start.elapsed().as_secs_f64());
    if all_ok {
        Ok(())
    } else {
        Err(Failure::Internal("loopback self-test lost frames".into()))
    }
}

