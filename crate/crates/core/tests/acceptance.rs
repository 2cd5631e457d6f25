//! Acceptance criteria. Run with `cargo test --test acceptance`; prints one
//! PASS/FAIL line per criterion and exits nonzero if any fails.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use nalgebra::Matrix3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use qinterf::harness::{run_monte_carlo, Exposure, McParams};
use qinterf::interference::{
    cosine_triple, f_statistic, fit_amplitudes, triple_cross_section, Amplitude, CosineTriple,
    CrossSectionSet,
};
use qinterf::neutron::{
    compose_slabs, delta_from_scattering, eta_from_absorption, fringe_visibility,
    order_discrepancy, phase_about, NuclearChannel, Slab, SlabPhase, Spectrum,
};
use qinterf::quat::{PureAxis, Quaternion, UnitQuaternion};

const SAMPLES: usize = 10_000;

type Outcome = Result<String, String>;
type Criterion = (&'static str, Option<u64>, fn() -> Outcome);

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn timed(limit: Option<Duration>, f: impl FnOnce() -> Outcome) -> Outcome {
    let start = Instant::now();
    let out = f();
    let elapsed = start.elapsed();
    let note = format!("{:.3} s", elapsed.as_secs_f64());
    match (out, limit) {
        (Ok(d), Some(l)) if elapsed > l => {
            Err(format!("{d}; took {note}, limit {} s", l.as_secs_f64()))
        }
        (Ok(d), _) => Ok(format!("{d}; {note}")),
        (Err(d), _) => Err(format!("{d}; {note}")),
    }
}

fn random_unit(rng: &mut ChaCha8Rng) -> UnitQuaternion {
    loop {
        let q = Quaternion::new(
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
        );
        if q.norm() > 1e-3 {
            return UnitQuaternion::new(q).expect("nonzero");
        }
    }
}

fn random_complex_amp(rng: &mut ChaCha8Rng) -> Amplitude {
    Amplitude::complex(rng.random_range(0.1..10.0), rng.random_range(-PI..PI)).unwrap()
}

fn random_quat_amp(rng: &mut ChaCha8Rng) -> Amplitude {
    Amplitude::new(rng.random_range(0.1..10.0), random_unit(rng)).unwrap()
}

fn f_of(amps: &[Amplitude; 3]) -> f64 {
    f_statistic(&cosine_triple(&CrossSectionSet::from_amplitudes(amps)).unwrap())
}

fn criterion_1() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst = 0.0f64;
    for _ in 0..SAMPLES {
        let amps = [(); 3].map(|_| random_complex_amp(&mut rng));
        worst = worst.max((f_of(&amps) - 1.0).abs());
    }
    check(
        worst <= 1e-10,
        format!("max |F-1| = {worst:.3e} over {SAMPLES} triples"),
    )
}

fn criterion_2() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for _ in 0..SAMPLES {
        let f = f_of(&[(); 3].map(|_| random_quat_amp(&mut rng)));
        lo = lo.min(f);
        hi = hi.max(f);
    }
    check(
        lo >= -1e-10 && hi <= 1.0 + 1e-10 && lo < 0.1,
        format!(
            "F in [{lo:.6e}, {hi:.12}] over {SAMPLES} triples, min below 0.1: {}",
            lo < 0.1
        ),
    )
}

fn criterion_3() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst = 0.0f64;
    for _ in 0..SAMPLES {
        let amps = [(); 3].map(|_| random_quat_amp(&mut rng));
        // Gram matrix straight from the directions, not from cross sections
        let u = amps.map(|a| a.direction());
        let g = Matrix3::from_fn(|r, c| u[r].dot4(u[c]));
        worst = worst.max((f_of(&amps) - (1.0 - g.determinant())).abs());
    }
    check(
        worst <= 1e-10,
        format!("max |F - (1 - det G)| = {worst:.3e}"),
    )
}

fn criterion_4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst = [0.0f64; 2];
    for (kind, w) in worst.iter_mut().enumerate() {
        for _ in 0..SAMPLES {
            let amps = if kind == 0 {
                [(); 3].map(|_| random_complex_amp(&mut rng))
            } else {
                [(); 3].map(|_| random_quat_amp(&mut rng))
            };
            let direct = (amps[0].value() + amps[1].value() + amps[2].value()).norm_squared();
            let set = CrossSectionSet::from_amplitudes(&amps);
            let predicted = triple_cross_section(&set).unwrap().predicted;
            *w = w.max((direct - predicted).abs() / direct);
        }
    }
    check(
        worst.iter().all(|w| *w <= 1e-12),
        format!(
            "max relative residual complex {:.3e}, quaternionic {:.3e}",
            worst[0], worst[1]
        ),
    )
}

fn criterion_5() -> Outcome {
    let ch = NuclearChannel::from_unitarity_scale(1e8, 0.0, 1.0).unwrap();
    let delta = delta_from_scattering(1.0, ch.k(), 1.0).map_err(|e| e.to_string())?;
    let eta = eta_from_absorption(1e4, ch.k()).map_err(|e| e.to_string())?;
    let (rd, re) = (delta / 1e-4 - 1.0, (1.0 - eta) / 2e-4 - 1.0);
    check(
        rd.abs() <= 0.01 && re.abs() <= 0.01,
        format!(
            "delta = {delta:.6e} ({:+.2e} rel), 1-eta = {:.6e} ({:+.2e} rel)",
            rd,
            1.0 - eta,
            re
        ),
    )
}

fn slab(deg: f64, axis: PureAxis) -> Slab {
    Slab::new(SlabPhase::from_degrees(deg, 0.0, axis).unwrap(), 1.0).unwrap()
}

fn criterion_6() -> Outcome {
    let (ti, al) = (slab(9860.0, PureAxis::I), slab(-9980.0, PureAxis::I));
    let net = compose_slabs(&[ti, al]).map_err(|e| e.to_string())?;
    let deg = phase_about(net, PureAxis::I).to_degrees();
    let err = ((deg + 120.0 + 180.0).rem_euclid(360.0) - 180.0).abs();
    let aligned = order_discrepancy(&ti, &al).map_err(|e| e.to_string())?;
    let crossed = order_discrepancy(&slab(90.0, PureAxis::I), &slab(90.0, PureAxis::J))
        .map_err(|e| e.to_string())?;
    check(
        err <= 1e-9 && aligned <= 1e-12 && (crossed - PI).abs() <= 1e-12,
        format!(
            "net phase {deg:.12} deg (error {err:.1e}), aligned discrepancy {aligned:.1e}, i/j discrepancy - pi = {:.1e}",
            crossed - PI
        ),
    )
}

fn criterion_7() -> Outcome {
    let spec = Spectrum::new(3.5, 0.01);
    let v = |s: &[Slab]| {
        fringe_visibility(s, &spec, PureAxis::I)
            .map(|f| f.visibility)
            .map_err(|e| e.to_string())
    };
    let ti = v(&[slab(9860.0, PureAxis::I)])?;
    let both = v(&[slab(9860.0, PureAxis::I), slab(-9980.0, PureAxis::I)])?;
    let net = v(&[slab(-120.0, PureAxis::I)])?;
    let rel = both / net - 1.0;
    check(
        ti < both && rel.abs() <= 0.05,
        format!("V(Ti) = {ti:.6}, V(Ti+Al) = {both:.6}, V(-120) = {net:.6}, relative difference {rel:+.3e}"),
    )
}

fn criterion_8() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut cases: Vec<([f64; 3], CosineTriple)> = Vec::new();
    for t in [
        (1.0, 1.0, 1.0),
        (0.0, 0.0, 0.0),
        (-0.5, -0.5, -0.5),
        (1.0, -1.0, -1.0),
        (0.5, 0.5, 0.5),
    ] {
        cases.push(([1.0, 2.0, 0.5], CosineTriple::new(t.0, t.1, t.2)));
    }
    for n in 0..2000 {
        let u = [(); 3].map(|_| {
            if n % 2 == 0 {
                random_unit(&mut rng)
            } else {
                UnitQuaternion::from_phase(rng.random_range(-PI..PI))
            }
        });
        let mags = [(); 3].map(|_| rng.random_range(0.2..5.0));
        cases.push((
            mags,
            CosineTriple::new(u[1].dot4(u[2]), u[2].dot4(u[0]), u[0].dot4(u[1])),
        ));
    }
    let (mut worst_res, mut worst_cos) = (0.0f64, 0.0f64);
    for (mags, t) in &cases {
        let s = mags.map(|m| m * m);
        let pair = |a: usize, b: usize, c: f64| s[a] + s[b] + 2.0 * mags[a] * mags[b] * c;
        let set = CrossSectionSet::new(
            s,
            [pair(0, 1, t.gamma), pair(1, 2, t.alpha), pair(2, 0, t.beta)],
        )
        .unwrap();
        let fit = fit_amplitudes(&set).map_err(|e| format!("{t:?}: {e}"))?;
        worst_res = worst_res.max(fit.residual_rms);
        for (a, b) in fit.cosines.as_array().iter().zip(t.as_array()) {
            worst_cos = worst_cos.max((a - b).abs());
        }
    }
    check(
        worst_res <= 1e-8 && worst_cos <= 1e-8,
        format!(
            "{} triples: max residual {worst_res:.3e} barn, max cosine error {worst_cos:.3e}",
            cases.len()
        ),
    )
}

fn criterion_9() -> Outcome {
    let complex = [0.0, 60.0, 150.0].map(|d: f64| Amplitude::complex(1.0, d.to_radians()).unwrap());
    let params = McParams {
        exposure: Exposure::CountsPerChannel(1e6),
        trials: 1000,
        seed: 20240101,
    };
    let c = run_monte_carlo(&CrossSectionSet::from_amplitudes(&complex), &params)
        .map_err(|e| e.to_string())?;
    let z = (c.mean - 1.0) / c.std_error;

    let quat = [UnitQuaternion::ONE, UnitQuaternion::I, UnitQuaternion::J]
        .map(|u| Amplitude::new(1.0, u).unwrap());
    let q = run_monte_carlo(&CrossSectionSet::from_amplitudes(&quat), &params)
        .map_err(|e| e.to_string())?;
    check(
        z.abs() <= 3.0 && q.fraction_above_one < 0.01 && c.used == 1000 && q.used == 1000,
        format!(
            "complex mean F = {:.8} ({z:+.2} SE), quaternionic mean F = {:.3e}, fraction F > 1 = {}",
            c.mean, q.mean, q.fraction_above_one
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("complex closure", Some(1), criterion_1),
        ("quaternionic bound", Some(1), criterion_2),
        ("Gram identity", None, criterion_3),
        ("triple identity", None, criterion_4),
        ("thermal neutron magnitudes", None, criterion_5),
        ("slab order null", None, criterion_6),
        ("visibility restoration", Some(5), criterion_7),
        ("fit round trip", None, criterion_8),
        ("Monte-Carlo sanity", Some(30), criterion_9),
    ];
    let mut failed = 0;
    println!("running {} acceptance criteria", criteria.len());
    for (n, (name, limit, f)) in criteria.into_iter().enumerate() {
        let out = timed(limit.map(Duration::from_secs), f);
        let (tag, detail) = match &out {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!("{tag} criterion {} ({name}): {detail}", n + 1);
    }
    println!("acceptance: {} passed, {failed} failed", 9 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
