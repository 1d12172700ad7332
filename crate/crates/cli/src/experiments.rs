//! One function per experiment. Each writes its CSV files through the
//! shared [`Context`] and records headline numbers for the summary.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use anyhow::{bail, Context as _, Result};
use num_complex::Complex64;
use serde_json::Value;
use v2i_radar::channel::{simulate_echo, EchoConfig, Target};
use v2i_radar::estimator::{cfar_detect, processing_gain, ChannelEstimator, RadarProcessor};
use v2i_radar::io as csv;
use v2i_radar::link::{self, average_rate, contact_time, snr, BeamConfig, McsTable, RoadGeometry};
use v2i_radar::mac::{
    legacy_bhi_duration, overhead_fraction, radar_bhi_duration, simulate_misalignment, Scenario,
};
use v2i_radar::planner::{
    self, closed_form_duty_ratio, CurvePoint, PlanConstraints, RadarTiming, SectorGeometry,
    SweepPlan,
};
use v2i_radar::waveform::{default_preamble, GolayPair, GolayParams, CEF_PAIR_LEN};

use crate::config::Config;

pub(crate) struct Context<'a> {
    cfg: &'a Config,
    dir: PathBuf,
    files: Vec<String>,
    headline: BTreeMap<String, Value>,
    notes: Vec<String>,
}

impl<'a> Context<'a> {
    pub(crate) fn new(cfg: &'a Config, dir: PathBuf) -> Self {
        Self {
            cfg,
            dir,
            files: Vec::new(),
            headline: BTreeMap::new(),
            notes: Vec::new(),
        }
    }

    pub(crate) fn finish(self) -> (Vec<String>, BTreeMap<String, Value>, Vec<String>) {
        (self.files, self.headline, self.notes)
    }

    fn csv(
        &mut self,
        name: &str,
        write: impl FnOnce(&mut BufWriter<File>) -> std::io::Result<()>,
    ) -> Result<()> {
        let path = self.dir.join(name);
        let file = File::create(&path).with_context(|| format!("creating {}", path.display()))?;
        let mut w = BufWriter::new(file);
        write(&mut w)
            .and_then(|_| w.flush())
            .with_context(|| format!("writing {}", path.display()))?;
        self.files.push(name.to_string());
        Ok(())
    }

    fn record(&mut self, key: &str, value: impl Into<Value>) {
        self.headline.insert(key.to_string(), value.into());
    }
}

pub(crate) fn golay_check(ctx: &mut Context) -> Result<()> {
    let mut rows = Vec::new();
    for k in 1..=9u32 {
        let n = 1usize << k;
        let pair = GolayPair::generate(n, &GolayParams::ascending(k))?;
        rows.push((format!("ascending_{n}"), pair));
    }
    rows.push((
        "dmg_128".into(),
        GolayPair::generate(128, &GolayParams::dmg_128())?,
    ));
    let (u, v) = GolayPair::dmg_cef_pairs();
    rows.push(("dmg_cef_u".into(), u));
    rows.push(("dmg_cef_v".into(), v));

    let worst = rows
        .iter()
        .map(|(_, p)| p.max_sidelobe())
        .max()
        .unwrap_or(0);
    ctx.csv("golay_check.csv", |w| {
        writeln!(w, "pair,length_chips,peak,max_offpeak")?;
        for (name, pair) in &rows {
            let acf = pair.complementary_autocorrelation();
            writeln!(
                w,
                "{name},{},{},{}",
                pair.len(),
                acf[pair.len() - 1],
                pair.max_sidelobe()
            )?;
        }
        Ok(())
    })?;
    ctx.record("golay_pairs_checked", rows.len());
    ctx.record("golay_max_offpeak", worst);
    if worst != 0 {
        bail!("complementary autocorrelation has off-peak value {worst}");
    }
    Ok(())
}

pub(crate) fn radar_chain(ctx: &mut Context) -> Result<()> {
    let r = &ctx.cfg.radar;
    let tx = default_preamble(r.frame);
    let targets: Vec<Target> = r
        .targets
        .iter()
        .map(|t| {
            Target::new(
                t.range_m,
                t.velocity_mps,
                Complex64::from_polar(t.amplitude, t.phase_deg.to_radians()),
            )
        })
        .collect();
    let echo = EchoConfig {
        pulses: r.pulses,
        pri_s: r.pri_s,
        range_bins: r.range_bins,
        noise_power: r.noise_power,
        seed: ctx.cfg.seed,
        convention: r.convention,
    };
    let train = simulate_echo(&tx, &targets, &echo)?;
    let processor = RadarProcessor::new(
        ChannelEstimator::for_preamble(r.frame, r.range_bins)?,
        r.fft_len,
        r.convention,
        r.cfar.clone(),
    );
    let ddm = processor.delay_doppler_map(&train)?;
    let detections = cfar_detect(&ddm, &r.cfar)?;

    ctx.csv("ddm.csv", |w| csv::write_ddm_csv(w, &ddm))?;
    ctx.csv("detections.csv", |w| {
        csv::write_detections_csv(w, &detections)
    })?;
    ctx.record("range_bin_m", ddm.range_bin_m());
    ctx.record("velocity_bin_mps", ddm.velocity_bin_mps());
    ctx.record(
        "processing_gain_db",
        10.0 * processing_gain(CEF_PAIR_LEN, r.pulses).log10(),
    );
    ctx.record("detections", detections.len());
    Ok(())
}

fn sweep_plan(cfg: &Config, dv: f64, phi_sradar_deg: f64) -> Result<SweepPlan> {
    let p = &cfg.planner;
    let timing = RadarTiming::for_resolution(p.frame, dv)?;
    let geometry = SectorGeometry::new(p.d_m, p.phi_bs_deg, p.theta_start_deg, phi_sradar_deg)?;
    Ok(SweepPlan::new(timing, geometry, p.v_max_mps)?)
}

fn constraints(cfg: &Config) -> PlanConstraints {
    PlanConstraints {
        w_car: cfg.planner.w_car_m,
        k1: cfg.planner.k1,
        k2: cfg.planner.k2,
    }
}

pub(crate) fn planner_sweep(ctx: &mut Context) -> Result<()> {
    let p = ctx.cfg.planner.clone();
    let plan = sweep_plan(ctx.cfg, p.dv_mps, p.phi_sradar_deg)?;
    let violations = plan.validate(&constraints(ctx.cfg));
    if !violations.is_empty() {
        let list: Vec<String> = violations.iter().map(ToString::to_string).collect();
        bail!("configured radar plan is infeasible: {}", list.join("; "));
    }

    let whole = SweepPlan::new(
        RadarTiming::for_resolution(p.frame, p.whole_area_dv_mps)?,
        SectorGeometry::new(p.d_m, p.phi_bs_deg, 0.0, p.phi_bs_deg)?,
        p.v_max_mps,
    )?;
    for v in whole.validate(&constraints(ctx.cfg)) {
        ctx.notes.push(format!("whole-coverage sweep: {v}"));
    }

    let velocity =
        planner::unambiguous_velocity_curve(p.unambiguous_max_pri_s, p.unambiguous_points);
    ctx.csv("unambiguous_velocity.csv", |w| {
        csv::write_curve_csv(w, "pri_s", "max_velocity_mps", &velocity)
    })?;
    let resolution = planner::doppler_resolution_curve(
        &p.resolution_pri_s,
        p.resolution_max_packets,
        p.resolution_packet_step,
    );
    ctx.csv("doppler_resolution.csv", |w| {
        csv::write_curve_csv(w, "packets", "resolution_mps", &resolution)
    })?;
    let duty = planner::duty_ratio_curve(
        p.d_m,
        p.phi_bs_deg,
        p.v_max_mps,
        p.dv_mps,
        &p.duty_theta_start_deg,
        &p.duty_phi_sradar_deg,
    )?;
    ctx.csv("duty_ratio.csv", |w| {
        csv::write_curve_csv(w, "phi_sradar_deg", "rho", &duty)
    })?;
    let mut lengths = Vec::new();
    for &phi in &p.duty_phi_sradar_deg {
        for &start in &p.duty_theta_start_deg {
            if start + phi <= p.phi_bs_deg {
                lengths.push(CurvePoint {
                    x: start,
                    y: planner::sector_length(p.d_m, p.phi_bs_deg, start, phi),
                    series: format!("phi_sradar_{phi}"),
                });
            }
        }
    }
    ctx.csv("sector_length.csv", |w| {
        csv::write_curve_csv(w, "theta_start_deg", "sector_length_m", &lengths)
    })?;

    ctx.record("min_pri_s", planner::min_pri(p.frame));
    ctx.record("range_resolution_m", plan.timing.range_resolution());
    ctx.record("packets", plan.timing.pulses);
    ctx.record("doppler_resolution_mps", plan.timing.doppler_resolution());
    ctx.record(
        "max_unambiguous_velocity_mps",
        plan.timing.max_unambiguous_velocity(),
    );
    ctx.record("sector_length_m", plan.sector_length());
    ctx.record("sweep_interval_s", plan.sweep_interval);
    ctx.record("t_radar_s", plan.t_radar);
    ctx.record("rho", plan.rho);
    ctx.record(
        "rho_closed_form",
        closed_form_duty_ratio(
            p.phi_sradar_deg,
            plan.timing.doppler_resolution(),
            plan.sector_length(),
            p.v_max_mps,
        ),
    );
    ctx.record("whole_area_t_radar_s", whole.t_radar);
    ctx.record("whole_area_movement_m", whole.movement_during_sweep());
    Ok(())
}

pub(crate) fn rate_sweep(ctx: &mut Context) -> Result<()> {
    let l = ctx.cfg.link.clone();
    l.params.validate()?;
    let table = McsTable::dmg_default();
    let phi_bs = ctx.cfg.planner.phi_bs_deg;
    let rate = |d: f64, az: f64| -> Result<link::RateSummary> {
        let road = RoadGeometry::new(d, phi_bs)?;
        let beam = BeamConfig::for_road(az, d, 0.0)?;
        Ok(average_rate(
            &road,
            l.speed_mps,
            &beam,
            &l.params,
            &table,
            l.dt_s,
        )?)
    };

    let mut by_distance = Vec::new();
    for &d in &l.distances_m {
        by_distance.push(CurvePoint {
            x: d,
            y: rate(d, l.theta_az_deg)?.mean_rate_bps,
            series: format!("theta_az_{}", l.theta_az_deg),
        });
    }
    let mut by_beamwidth = Vec::new();
    for &az in &l.beamwidths_deg {
        by_beamwidth.push(CurvePoint {
            x: az,
            y: rate(l.d_m, az)?.mean_rate_bps,
            series: format!("d_{}", l.d_m),
        });
    }
    ctx.csv("rate_vs_distance.csv", |w| {
        csv::write_curve_csv(w, "d_m", "mean_rate_bps", &by_distance)
    })?;
    ctx.csv("rate_vs_beamwidth.csv", |w| {
        csv::write_curve_csv(w, "theta_az_deg", "mean_rate_bps", &by_beamwidth)
    })?;

    let reference = rate(l.d_m, l.theta_az_deg)?;
    let beam = BeamConfig::for_road(l.theta_az_deg, l.d_m, 0.0)?;
    ctx.record("snr_broadside_db", snr(&beam, l.d_m, &l.params, 0.0)?);
    ctx.record("noise_power_dbm", link::noise_power(&l.params));
    ctx.record("contact_time_s", contact_time(l.d_m, phi_bs, l.speed_mps));
    ctx.record("mean_rate_bps", reference.mean_rate_bps);
    ctx.record("outage_fraction", reference.outage_fraction);
    Ok(())
}

fn scenario(cfg: &Config, dv: f64, overlap: f64, phi_sradar_deg: f64) -> Result<Scenario> {
    let s = &cfg.scenario;
    let plan = sweep_plan(cfg, dv, phi_sradar_deg)?;
    let beam = BeamConfig::for_road(s.theta_az_deg, cfg.planner.d_m, overlap)?;
    Ok(Scenario::new(plan, beam, s.vehicles.clone(), cfg.seed)?)
}

fn cdf_points(
    label: String,
    cdf: &v2i_radar::mac::MisalignmentCdf,
) -> impl Iterator<Item = CurvePoint> + '_ {
    cdf.position_m
        .iter()
        .zip(&cdf.probability)
        .map(move |(&x, &y)| CurvePoint {
            x,
            y,
            series: label.clone(),
        })
}

pub(crate) fn misalignment(ctx: &mut Context) -> Result<()> {
    let cfg = ctx.cfg;
    let s = &cfg.scenario;
    let phi = cfg.planner.phi_sradar_deg;
    let mut by_dv = Vec::new();
    for &dv in &s.sweep_dv_mps {
        let cdf = simulate_misalignment(
            &scenario(cfg, dv, s.overlap_ratio, phi)?,
            cfg.trials,
            cfg.seed,
        )?;
        by_dv.extend(cdf_points(format!("dv_{dv}"), &cdf));
    }
    let mut by_overlap = Vec::new();
    for &o in &s.sweep_overlap_ratio {
        let cdf = simulate_misalignment(&scenario(cfg, s.dv_mps, o, phi)?, cfg.trials, cfg.seed)?;
        by_overlap.extend(cdf_points(format!("overlap_{o}"), &cdf));
    }
    let reference = simulate_misalignment(
        &scenario(cfg, s.dv_mps, s.overlap_ratio, phi)?,
        cfg.trials,
        cfg.seed,
    )?;
    ctx.csv("misalignment_dv.csv", |w| {
        csv::write_curve_csv(w, "position_m", "probability", &by_dv)
    })?;
    ctx.csv("misalignment_overlap.csv", |w| {
        csv::write_curve_csv(w, "position_m", "probability", &by_overlap)
    })?;
    ctx.csv("misalignment.csv", |w| csv::write_cdf_csv(w, &reference))?;
    ctx.record("misalignment_at_end", reference.at_end());
    Ok(())
}

pub(crate) fn overhead(ctx: &mut Context) -> Result<()> {
    let cfg = ctx.cfg;
    let mac = &cfg.mac;
    mac.validate()?;
    let s = &cfg.scenario;
    let reference = scenario(cfg, s.dv_mps, s.overlap_ratio, cfg.planner.phi_sradar_deg)?;
    let legacy_bhi = legacy_bhi_duration(mac);
    let legacy_pct = overhead_fraction(legacy_bhi, mac.bi_duration_s);
    let detected = reference.detected_vehicles();
    let radar_bhi = radar_bhi_duration(mac, &reference.plan, detected);
    let radar_pct = overhead_fraction(radar_bhi, reference.plan.sweep_interval);

    let mut curve = Vec::new();
    for &phi in &s.overhead_phi_sradar_deg {
        let sc = scenario(cfg, s.dv_mps, s.overlap_ratio, phi)?;
        let bhi = radar_bhi_duration(mac, &sc.plan, sc.detected_vehicles());
        let point = |series: &str, y: f64| CurvePoint {
            x: phi,
            y,
            series: series.into(),
        };
        curve.push(point("bhi_radar_ms", bhi * 1e3));
        curve.push(point(
            "overhead_radar_pct",
            overhead_fraction(bhi, sc.plan.sweep_interval),
        ));
        curve.push(point("rho", sc.plan.rho));
    }

    ctx.csv("overhead.csv", |w| {
        writeln!(w, "scheme,bhi_ms,repeat_ms,overhead_pct")?;
        writeln!(
            w,
            "legacy,{},{},{legacy_pct}",
            legacy_bhi * 1e3,
            mac.bi_duration_s * 1e3
        )?;
        writeln!(
            w,
            "radar,{},{},{radar_pct}",
            radar_bhi * 1e3,
            reference.plan.sweep_interval * 1e3
        )
    })?;
    ctx.csv("overhead_vs_phi.csv", |w| {
        csv::write_curve_csv(w, "phi_sradar_deg", "value", &curve)
    })?;
    ctx.record("bhi_legacy_ms", legacy_bhi * 1e3);
    ctx.record("bhi_radar_ms", radar_bhi * 1e3);
    ctx.record("detected_vehicles", detected);
    ctx.record("overhead_legacy_pct", legacy_pct);
    ctx.record("overhead_radar_pct", radar_pct);
    ctx.record("reduction_pct", 100.0 * (1.0 - radar_pct / legacy_pct));
    Ok(())
}
