//! Single-realization report: spectra, water levels, gains, relay power,
//! KKT residuals and every capacity form for each RTM kind.

use std::fmt::Write;

use relay_rtm_core::evaluate::{
    self, capacity_forms, data_processing_ceiling, naf_rtm, parametric_capacity,
    verify_kkt_capacity, verify_kkt_ostbc, KktReport,
};
use relay_rtm_core::network::{translate_scenario, validate, Warning};
use relay_rtm_core::opt_capacity::{
    assemble_rtm, build_capacity_spectra, capacity_thresholds, waterfill_capacity,
};
use relay_rtm_core::opt_ostbc::{build_ostbc_spectra, ostbc_thresholds, waterfill_ostbc_segment};
use relay_rtm_core::{ChannelSet, Dims, PowerBudget, RtmKind, WaterLevel, DEFAULT_RANK_TOL};

use crate::config::{ExplainSource, RunConfig};
use crate::montecarlo::sample_channels;

fn list(v: &[f64]) -> String {
    let items: Vec<String> = v.iter().map(|x| x.to_string()).collect();
    format!("[{}]", items.join(", "))
}

fn flags(v: &[bool]) -> String {
    let items: Vec<&str> = v.iter().map(|&b| if b { "on" } else { "off" }).collect();
    format!("[{}]", items.join(", "))
}

fn level(xi: WaterLevel) -> String {
    match xi {
        WaterLevel::Level(v) => v.to_string(),
        WaterLevel::NoWater => "no water (all alpha are zero)".into(),
        WaterLevel::NotApplicable => "n/a".into(),
    }
}

fn kkt_line(k: &KktReport) -> String {
    format!(
        "stationarity {:e}, complementary slackness {:e}, primal {:e}, dual {:e}",
        k.stationarity_residual,
        k.complementary_slackness,
        k.primal_feasibility,
        k.dual_feasibility
    )
}

/// The realization to explain, already in generic-model units.
pub fn explain_network(cfg: &RunConfig) -> Option<(ChannelSet, PowerBudget, String)> {
    let e = cfg.explain.as_ref()?;
    let spec = &cfg.sweep;
    Some(match &e.source {
        ExplainSource::Network { channels, power } => {
            (channels.clone(), *power, "explicit network".into())
        }
        ExplainSource::Sampled { seed, trial } => {
            let raw = sample_channels(spec.scenario.dims, *seed, *trial);
            let scn = spec.sweep_axis.apply(&spec.scenario, e.sweep_db);
            let (ch, pb) = translate_scenario(&scn, &raw);
            let link = if scn.direct_link_enabled {
                format!("rho0 {} dB", scn.rho0_db)
            } else {
                "no direct link".into()
            };
            let desc = format!(
                "seed {seed}, trial {trial}: {link}, rho1 {} dB, rho2 {} dB",
                scn.rho1_db, scn.rho2_db
            );
            (ch, pb, desc)
        }
    })
}

pub fn explain_report(cfg: &RunConfig) -> Result<String, relay_rtm_core::Error> {
    let (ch, pb, desc) = explain_network(cfg).expect("explain section present");
    let dims = cfg.sweep.scenario.dims;
    let mut s = String::new();
    let _ = writeln!(s, "realization: {desc}");
    let _ = writeln!(
        s,
        "dims: t={} r={} s={} u={}",
        dims.t, dims.r, dims.s, dims.u
    );
    let _ = writeln!(s, "power: P1 = {}, P2 = {}", pb.p1, pb.p2);
    let v = validate(dims, &ch, &pb)?;
    for w in &v.warnings {
        let _ = writeln!(
            s,
            "warning: {}",
            match w {
                Warning::SourceRelayDead => "H1 is zero, the relay hears nothing",
                Warning::RelayDestinationDead =>
                    "H2 is zero, the relay cannot reach the destination",
            }
        );
    }
    let _ = writeln!(
        s,
        "ceiling (noiseless second hop): {}",
        data_processing_ceiling(&ch, &pb, dims)?
    );

    for &kind in &cfg.sweep.rtm_kinds {
        let _ = writeln!(s);
        match kind {
            RtmKind::Opt1 => opt1(&mut s, &ch, &pb, dims, cfg.sweep.symbol_rate)?,
            RtmKind::Opt2 => opt2(&mut s, &ch, &pb, dims, cfg.sweep.symbol_rate)?,
            RtmKind::Naf => naf(&mut s, &ch, &pb, dims, cfg.sweep.symbol_rate)?,
        }
    }
    Ok(s)
}

fn metrics(
    s: &mut String,
    ch: &ChannelSet,
    pb: &PowerBudget,
    dims: Dims,
    x: &relay_rtm_core::CMatrix,
    rate: f64,
) -> Result<(), relay_rtm_core::Error> {
    let (direct, rewritten) = capacity_forms(ch, pb, dims, x)?;
    let _ = writeln!(s, "  capacity (direct form): {direct}");
    let _ = writeln!(s, "  capacity (rewritten form): {rewritten}");
    let ostbc = evaluate::ostbc_capacity(ch, pb, dims, x, rate)?;
    let _ = writeln!(s, "  ostbc capacity (R = {rate}): {}", ostbc.bits);
    Ok(())
}

fn opt1(
    s: &mut String,
    ch: &ChannelSet,
    pb: &PowerBudget,
    dims: Dims,
    rate: f64,
) -> Result<(), relay_rtm_core::Error> {
    let sp = build_capacity_spectra(ch, pb, dims, DEFAULT_RANK_TOL)?;
    let wf = waterfill_capacity(&sp.alpha, &sp.beta, pb.p2)?;
    let sol = assemble_rtm(&sp, &wf)?;
    let _ = writeln!(s, "[{}] capacity criterion", RtmKind::Opt1.name());
    let _ = writeln!(
        s,
        "  modes: {} (rank A {}, rank B {})",
        sp.rho, sp.rho_a, sp.rho_b
    );
    let _ = writeln!(s, "  alpha: {}", list(&sp.alpha));
    if !sp.alpha_tail.is_empty() {
        let _ = writeln!(s, "  alpha (unpowered modes): {}", list(&sp.alpha_tail));
    }
    let _ = writeln!(s, "  beta: {}", list(&sp.beta));
    let _ = writeln!(
        s,
        "  thresholds: {}",
        list(&capacity_thresholds(&sp.alpha, &sp.beta))
    );
    let _ = writeln!(s, "  xi: {}", level(wf.xi));
    let _ = writeln!(s, "  x: {}", list(&wf.x));
    let _ = writeln!(s, "  active: {}", flags(&wf.active));
    let _ = writeln!(s, "  relay power: {} of {}", sol.relay_power_used, pb.p2);
    let _ = writeln!(
        s,
        "  kkt: {}",
        kkt_line(&verify_kkt_capacity(&sp.alpha, &sp.beta, pb.p2, &wf))
    );
    metrics(s, ch, pb, dims, &sol.x_matrix, rate)?;
    let param = parametric_capacity(ch, pb, dims, &sp.full_alpha(), &wf.x)?;
    let _ = writeln!(s, "  capacity (parametric form): {param}");
    Ok(())
}

fn opt2(
    s: &mut String,
    ch: &ChannelSet,
    pb: &PowerBudget,
    dims: Dims,
    rate: f64,
) -> Result<(), relay_rtm_core::Error> {
    let sp = build_ostbc_spectra(ch, pb, dims, DEFAULT_RANK_TOL)?;
    let (wf, seg) = waterfill_ostbc_segment(&sp.alpha, &sp.beta, pb.p2)?;
    let sol = assemble_rtm(&sp, &wf)?;
    let _ = writeln!(s, "[{}] ostbc criterion", RtmKind::Opt2.name());
    let _ = writeln!(
        s,
        "  modes: {} (rank A {}, rank B {})",
        sp.rho, sp.rho_a, sp.rho_b
    );
    let _ = writeln!(s, "  alpha: {}", list(&sp.alpha));
    let _ = writeln!(s, "  beta: {}", list(&sp.beta));
    let _ = writeln!(
        s,
        "  thresholds: {}",
        list(&ostbc_thresholds(&sp.alpha, &sp.beta))
    );
    let _ = writeln!(s, "  xi: {}", level(wf.xi));
    match seg {
        Some(seg) => {
            let _ = writeln!(
                s,
                "  segment: activation order {:?}, {} of {} active, xi in ({}, {}]",
                seg.activation_order,
                seg.active_count,
                seg.activation_order.len(),
                seg.lower,
                seg.upper
            );
        }
        None => {
            let _ = writeln!(s, "  segment: none");
        }
    }
    let _ = writeln!(s, "  x: {}", list(&wf.x));
    let _ = writeln!(s, "  active: {}", flags(&wf.active));
    let _ = writeln!(s, "  relay power: {} of {}", sol.relay_power_used, pb.p2);
    let _ = writeln!(
        s,
        "  kkt: {}",
        kkt_line(&verify_kkt_ostbc(&sp.alpha, &sp.beta, pb.p2, &wf))
    );
    metrics(s, ch, pb, dims, &sol.x_matrix, rate)
}

fn naf(
    s: &mut String,
    ch: &ChannelSet,
    pb: &PowerBudget,
    dims: Dims,
    rate: f64,
) -> Result<(), relay_rtm_core::Error> {
    let sol = naf_rtm(ch, pb, dims)?;
    let _ = writeln!(s, "[{}] scaled identity", RtmKind::Naf.name());
    let _ = writeln!(
        s,
        "  gain squared: {}",
        sol.wf.x.first().copied().unwrap_or(0.0)
    );
    if let Some(note) = sol.note {
        let _ = writeln!(s, "  note: {note}");
    }
    let _ = writeln!(s, "  relay power: {} of {}", sol.relay_power_used, pb.p2);
    metrics(s, ch, pb, dims, &sol.x_matrix, rate)
}
