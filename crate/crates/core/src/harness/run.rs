//! One function per subcommand. Each turns an input file into a [`Report`].

use std::path::Path;

use super::config::{ExperimentConfig, Mode, ResolvedSlab};
use super::ingest::read_cross_sections;
use super::montecarlo::{run_monte_carlo, Exposure, McParams};
use super::report::{axis_text, Provenance, Report, Section};
use crate::error::{Error, Result};
use crate::interference::{
    classify, cosine_triple, f_with_error, fit_amplitudes, triple_cross_section, Amplitude,
    Channel, CosineTriple, CrossSectionSet, TheoryVerdict,
};
use crate::mixtures::assess_mixture;
use crate::neutron::{
    absorption_xsec, compose_slabs, forward_amplitude_value, fringe_visibility, order_discrepancy,
    phase_about, scattering_xsec, Slab,
};

/// Command-line overrides shared by all modes.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct RunOptions {
    pub tol: Option<f64>,
    pub seed: Option<u64>,
}

/// Raw input file: its label (normally the path) and bytes.
#[derive(Debug, Clone)]
pub struct Input {
    pub label: String,
    pub bytes: Vec<u8>,
}

impl Input {
    pub fn read(path: &Path) -> Result<Self> {
        let label = path.display().to_string();
        let bytes = std::fs::read(path)
            .map_err(|e| std::io::Error::new(e.kind(), format!("{label}: {e}")))?;
        Ok(Self { label, bytes })
    }

    pub fn from_text(label: &str, text: &str) -> Self {
        Self {
            label: label.into(),
            bytes: text.as_bytes().to_vec(),
        }
    }

    fn text(&self) -> Result<&str> {
        std::str::from_utf8(&self.bytes).map_err(|e| {
            let line = self.bytes[..e.valid_up_to()]
                .iter()
                .filter(|b| **b == b'\n')
                .count() as u64
                + 1;
            Error::Parse {
                line,
                message: "input is not valid UTF-8".into(),
            }
        })
    }

    fn config(&self, mode: Mode) -> Result<ExperimentConfig> {
        let cfg = ExperimentConfig::parse(self.text()?)?;
        cfg.check_mode(mode)?;
        Ok(cfg)
    }

    fn report(&self, mode: Mode, seed: Option<u64>, sections: Vec<Section>) -> Report {
        Report {
            mode,
            provenance: Provenance::new(&self.label, &self.bytes, seed),
            sections,
        }
    }
}

fn cross_section_section(title: &str, set: &CrossSectionSet) -> Section {
    let mut s = Section::new(title);
    for c in Channel::ALL {
        if let Some(v) = set.get(c) {
            s.quantity(format!("sigma{c}"), v, "barn");
        }
        if let Some(e) = set.error(c) {
            s.quantity(format!("sigma{c}.err"), e, "barn");
        }
    }
    s
}

fn cosine_section(t: &CosineTriple) -> Section {
    let mut s = Section::new("cosines");
    s.quantity("alpha", t.alpha, "1")
        .quantity("beta", t.beta, "1")
        .quantity("gamma", t.gamma, "1");
    if let Some([ea, eb, eg]) = t.std_errors() {
        s.quantity("alpha.err", ea, "1")
            .quantity("beta.err", eb, "1")
            .quantity("gamma.err", eg, "1");
    }
    s
}

fn verdict_section(v: &TheoryVerdict) -> Section {
    let mut s = Section::new("discriminator");
    s.quantity("F", v.f_value, "1");
    if let Some(e) = v.f_error {
        s.quantity("F.err", e, "1");
    }
    s.quantity("tolerance", v.tolerance, "1")
        .text("class", v.class.to_string());
    s
}

fn triple_section(set: &CrossSectionSet) -> Result<Section> {
    let t = triple_cross_section(set)?;
    let mut s = Section::new("triple");
    s.quantity("sigma123.predicted", t.predicted, "barn");
    if let Some(r) = t.residual {
        s.quantity("sigma123.residual", r, "barn");
    }
    Ok(s)
}

fn amplitude_section(title: &str, amps: &[Amplitude; 3]) -> Section {
    let mut s = Section::new(title);
    for (n, a) in amps.iter().enumerate() {
        s.quantity(format!("u{}.magnitude", n + 1), a.magnitude(), "sqrt(barn)");
        s.quaternion(&format!("u{}.direction", n + 1), a.direction().get(), "1");
    }
    s
}

/// Full analysis of a measured or simulated set.
fn analysis(set: &CrossSectionSet, tol: Option<f64>) -> Result<Vec<Section>> {
    let cos = cosine_triple(set)?;
    let verdict = classify(&cos, tol)?;
    Ok(vec![
        triple_section(set)?,
        cosine_section(&cos),
        verdict_section(&verdict),
    ])
}

pub fn classify_csv(input: &Input, opts: &RunOptions) -> Result<Report> {
    let set = read_cross_sections(&input.bytes[..])?;
    let mut sections = vec![cross_section_section("cross sections", &set)];
    sections.extend(analysis(&set, opts.tol)?);
    Ok(input.report(Mode::Classify, None, sections))
}

pub fn fit_csv(input: &Input, opts: &RunOptions) -> Result<Report> {
    let set = read_cross_sections(&input.bytes[..])?;
    let fit = fit_amplitudes(&set)?;
    let mut sections = vec![cross_section_section("cross sections", &set)];
    sections.extend(analysis(&set, opts.tol)?);
    sections.push(amplitude_section("fitted amplitudes", &fit.amplitudes));
    let mut s = Section::new("fit");
    for (c, r) in [Channel::S23, Channel::S31, Channel::S12]
        .iter()
        .zip(fit.pair_residuals)
    {
        s.quantity(format!("sigma{c}.residual"), r, "barn");
    }
    s.quantity("residual_rms", fit.residual_rms, "barn")
        .quantity("alpha", fit.cosines.alpha, "1")
        .quantity("beta", fit.cosines.beta, "1")
        .quantity("gamma", fit.cosines.gamma, "1")
        .quantity("F", f_with_error(&fit.cosines).0, "1")
        .count("iterations", fit.iterations as u64);
    sections.push(s);
    Ok(input.report(Mode::Fit, None, sections))
}

/// A simulated experiment: the report and the set that produced it.
#[derive(Debug, Clone)]
pub struct Simulation {
    pub report: Report,
    pub set: CrossSectionSet,
}

pub fn simulate_config(input: &Input, opts: &RunOptions) -> Result<Simulation> {
    let cfg = input.config(Mode::Simulate)?;
    let tol = opts.tol.or(cfg.tolerance);
    if cfg.is_mixture() {
        let ensemble = cfg.ensemble()?;
        let asserted = cfg.mixture.as_ref().is_some_and(|m| m.spin_independent);
        let a = assess_mixture(&ensemble, asserted, tol)?;
        let mut sections = Vec::new();
        for (name, c) in cfg.component.keys().zip(&ensemble) {
            let mut s = amplitude_section(&format!("component {name}"), &c.amps);
            s.quantity("weight", c.weight, "1");
            sections.push(s);
        }
        sections.push(cross_section_section("averaged cross sections", &a.set));
        sections.push(cosine_section(&a.cosines));
        match &a.verdict {
            Some(v) => sections.push(verdict_section(v)),
            None => {
                let mut s = Section::new("discriminator");
                s.quantity("F", a.f_value, "1").text(
                    "class",
                    "none (spin independence not asserted; F of a mixture is not a theory test)",
                );
                sections.push(s);
            }
        }
        let mut s = Section::new("mixture");
        s.text("probative", a.probative.to_string());
        sections.push(s);
        return Ok(Simulation {
            report: input.report(Mode::Simulate, None, sections),
            set: a.set,
        });
    }
    let amps = cfg.amplitudes()?;
    let set = CrossSectionSet::from_amplitudes(&amps);
    let mut sections = vec![
        amplitude_section("amplitudes", &amps),
        cross_section_section("cross sections", &set),
    ];
    sections.extend(analysis(&set, tol)?);
    Ok(Simulation {
        report: input.report(Mode::Simulate, None, sections),
        set,
    })
}

fn slab_section(r: &ResolvedSlab) -> Section {
    let mut s = Section::new(format!("slab {}", r.name));
    let p = &r.slab.phase;
    s.text("axis", axis_text(p.axis))
        .quantity("optical", p.optical, "rad")
        .quantity("optical_deg", p.optical.to_degrees(), "deg")
        .quantity("attenuation", p.attenuation, "1")
        .quantity("transmission", r.slab.transmission, "1");
    if let Some(spec) = &r.spec {
        let ch = &spec.channel;
        s.quantity("k", ch.k(), "1/sqrt(barn)")
            .quantity("delta", ch.delta(), "rad")
            .quantity("eta", ch.eta(), "1")
            .quantity("density", spec.density, "barn^-3/2")
            .quantity("thickness", spec.thickness, "sqrt(barn)")
            .quantity("sigma_s", scattering_xsec(ch), "barn")
            .quantity("sigma_a", absorption_xsec(ch), "barn")
            .quantity("four_pi_over_k2", ch.unitarity_scale(), "barn")
            .quaternion("f", forward_amplitude_value(ch, spec.axis), "sqrt(barn)");
    }
    s
}

pub fn neutron_config(input: &Input, _opts: &RunOptions) -> Result<Report> {
    let cfg = input.config(Mode::Neutron)?;
    let resolved = cfg.slabs()?;
    let slabs: Vec<Slab> = resolved.iter().map(|r| r.slab).collect();
    let reference = cfg.reference_axis()?;
    let mut sections: Vec<Section> = resolved.iter().map(slab_section).collect();

    let net = compose_slabs(&slabs)?;
    let mut s = Section::new("composition");
    s.text(
        "order",
        resolved
            .iter()
            .map(|r| r.name.as_str())
            .collect::<Vec<_>>()
            .join(" -> "),
    )
    .text("reference_axis", axis_text(reference))
    .quaternion("operator", net, "1")
    .quantity("modulus", net.norm(), "1")
    .quantity("phase", phase_about(net, reference), "rad")
    .quantity("phase_deg", phase_about(net, reference).to_degrees(), "deg");
    for pair in resolved.windows(2) {
        let d = order_discrepancy(&pair[0].slab, &pair[1].slab)?;
        s.quantity(
            format!("order_discrepancy[{},{}]", pair[0].name, pair[1].name),
            d,
            "rad",
        );
    }
    if slabs.len() > 2 {
        let reversed: Vec<Slab> = slabs.iter().rev().copied().collect();
        s.quantity(
            "reversal_discrepancy",
            net.angle_between(compose_slabs(&reversed)?),
            "rad",
        );
    }
    sections.push(s);

    let spectrum = cfg.spectrum.clone().unwrap_or_default().spectrum();
    let mut s = Section::new("visibility");
    s.quantity("k0", spectrum.k0, "1/angstrom")
        .quantity("relative_spread", spectrum.relative_spread, "1")
        .count("nodes", spectrum.nodes as u64);
    let all = fringe_visibility(&slabs, &spectrum, reference)?;
    s.quantity("V", all.visibility, "1")
        .quantity("phase_deg", all.phase.to_degrees(), "deg");
    if slabs.len() > 1 {
        for (r, slab) in resolved.iter().zip(&slabs) {
            let v = fringe_visibility(std::slice::from_ref(slab), &spectrum, reference)?;
            s.quantity(format!("V[{}]", r.name), v.visibility, "1");
        }
    }
    sections.push(s);
    Ok(input.report(Mode::Neutron, None, sections))
}

pub fn monte_carlo_config(input: &Input, opts: &RunOptions) -> Result<Report> {
    let cfg = input.config(Mode::Mc)?;
    let seed = opts
        .seed
        .or(cfg.seed)
        .ok_or_else(|| Error::Schema("mc needs a seed (config `seed` or --seed)".into()))?;
    let mc = cfg.mc()?;
    let params = McParams {
        exposure: mc.exposure()?,
        trials: mc.trials,
        seed,
    };
    let amps = cfg.amplitudes()?;
    let truth = CrossSectionSet::from_amplitudes(&amps);
    let summary = run_monte_carlo(&truth, &params)?;

    let mut p = Section::new("parameters");
    match params.exposure {
        Exposure::CountsPerBarn(r) => p.quantity("counts_per_barn", r, "1/barn"),
        Exposure::CountsPerChannel(n) => p.quantity("counts_per_channel", n, "count"),
    };
    p.count("trials", params.trials as u64)
        .text("seed", seed.to_string());
    let mut s = Section::new("summary");
    s.quantity("F.true", summary.true_f, "1")
        .count("used", summary.used as u64)
        .count("excluded", summary.excluded as u64)
        .quantity("F.mean", summary.mean, "1")
        .quantity("F.std", summary.std_dev, "1")
        .quantity("F.se", summary.std_error, "1");
    if summary.std_error > 0.0 {
        s.quantity(
            "bias_in_se",
            (summary.mean - summary.true_f) / summary.std_error,
            "1",
        );
    }
    for (level, v) in &summary.quantiles {
        s.quantity(format!("F.q{level}"), *v, "1");
    }
    s.quantity("fraction_F_above_1", summary.fraction_above_one, "1");
    let sections = vec![
        amplitude_section("amplitudes", &amps),
        cross_section_section("true cross sections", &truth),
        p,
        s,
    ];
    Ok(input.report(Mode::Mc, Some(seed), sections))
}
