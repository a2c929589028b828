//! End-to-end acceptance checks. Runs without the libtest harness so that
//! every criterion prints one PASS/FAIL line; exits nonzero if any fail.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use ehrelay::analytic::{
    cdf_from_constants, constants, ergodic_capacity, outage_probability, snr_cdf, snr_pdf, AnalyticMethod,
};
use ehrelay::experiments::{figure_preset, run_sweep, SweepSpec, SweptParameter, PRESET_NAMES};
use ehrelay::montecarlo::{capacity_empirical, outage_empirical, McSettings};
use ehrelay::optimize::{optimize_fraction, OptResult, DEFAULT_FRAC_TOL};
use ehrelay::throughput::{throughput, EvalMethod};
use ehrelay::{Protocol, ProtocolFamily, QuadratureSettings, SystemParams, TransmissionMode};

const DL: TransmissionMode = TransmissionMode::DelayLimited;
const DT: TransmissionMode = TransmissionMode::DelayTolerant;
const FRACTIONS: [f64; 9] = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9];

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn optimum(params: &SystemParams, family: ProtocolFamily, mode: TransmissionMode) -> OptResult {
    optimize_fraction(params, family, mode, EvalMethod::Exact, DEFAULT_FRAC_TOL).unwrap()
}

fn with_noise(na: f64, nc: f64) -> SystemParams {
    SystemParams {
        antenna_noise_var: na,
        conversion_noise_var: nc,
        ..Default::default()
    }
}

fn criterion_01_optimal_alpha() -> Outcome {
    let start = Instant::now();
    let r = optimum(&SystemParams::default(), ProtocolFamily::Tsr, DL);
    let elapsed = start.elapsed();
    let pass = (0.25..=0.31).contains(&r.best_fraction) && elapsed <= Duration::from_secs(30);
    outcome(
        pass,
        format!(
            "alpha* = {:.4}, tau = {:.4}, {:.2?}",
            r.best_fraction, r.best_throughput, elapsed
        ),
    )
}

fn criterion_02_optimal_rho() -> Outcome {
    let start = Instant::now();
    let r = optimum(&SystemParams::default(), ProtocolFamily::Psr, DL);
    let elapsed = start.elapsed();
    let pass = (0.60..=0.66).contains(&r.best_fraction) && elapsed <= Duration::from_secs(30);
    outcome(
        pass,
        format!(
            "rho* = {:.4}, tau = {:.4}, {:.2?}",
            r.best_fraction, r.best_throughput, elapsed
        ),
    )
}

fn criterion_03_analytic_matches_monte_carlo() -> Outcome {
    let start = Instant::now();
    let mut protocols = Vec::new();
    for f in [0.1, 0.3, 0.5, 0.7, 0.9] {
        protocols.push(Protocol::tsr(f).unwrap());
        protocols.push(Protocol::psr(f).unwrap());
    }
    protocols.push(Protocol::Ideal);
    let mut cells = 0;
    let mut outage_ok = 0;
    let mut capacity_ok = 0;
    let mut misses = Vec::new();
    for (i, proto) in protocols.iter().enumerate() {
        for (j, na) in [0.01, 0.05].into_iter().enumerate() {
            let p = with_noise(na, 0.01);
            let mc = McSettings {
                num_realizations: 100_000,
                master_seed: 1000 + (2 * i + j) as u64,
                antithetic: false,
            };
            cells += 1;
            let exact = outage_probability(&p, proto, AnalyticMethod::Exact).unwrap();
            let est = outage_empirical(&p, proto, &mc).unwrap();
            if (exact - est.value).abs() <= 4.0 * est.std_error {
                outage_ok += 1;
            } else {
                misses.push(format!(
                    "outage {proto} na={na}: {exact:.5} vs {:.5}±{:.5}",
                    est.value, est.std_error
                ));
            }
            let exact = ergodic_capacity(&p, proto, AnalyticMethod::Exact).unwrap();
            let est = capacity_empirical(&p, proto, &mc).unwrap();
            if (exact - est.value).abs() <= 4.0 * est.std_error {
                capacity_ok += 1;
            } else {
                misses.push(format!(
                    "capacity {proto} na={na}: {exact:.5} vs {:.5}±{:.5}",
                    est.value, est.std_error
                ));
            }
        }
    }
    let elapsed = start.elapsed();
    let need = (0.95 * cells as f64).ceil() as usize;
    let pass = outage_ok >= need && capacity_ok >= need && elapsed <= Duration::from_secs(300);
    outcome(
        pass,
        format!(
            "outage {outage_ok}/{cells}, capacity {capacity_ok}/{cells} within 4 SE, {:.1?}{}",
            elapsed,
            if misses.is_empty() {
                String::new()
            } else {
                format!("; misses: {}", misses.join("; "))
            }
        ),
    )
}

fn criterion_04_approximation_fidelity() -> Outcome {
    let mut protocols: Vec<Protocol> = Vec::new();
    for f in FRACTIONS {
        protocols.push(Protocol::tsr(f).unwrap());
        protocols.push(Protocol::psr(f).unwrap());
    }
    protocols.push(Protocol::Ideal);

    let mut worst_outage = (0.0, String::new());
    let mut worst_capacity = (0.0, String::new());
    let mut breaches = Vec::new();
    let mut not_shrinking = Vec::new();
    for proto in &protocols {
        let mut prev = (f64::INFINITY, f64::INFINITY);
        for k in [1.0, 0.5, 0.25, 0.125] {
            let p = with_noise(0.01 * k, 0.01 * k);
            let oe = outage_probability(&p, proto, AnalyticMethod::Exact).unwrap();
            let oa = outage_probability(&p, proto, AnalyticMethod::HighSnrApprox).unwrap();
            let ce = ergodic_capacity(&p, proto, AnalyticMethod::Exact).unwrap();
            let ca = ergodic_capacity(&p, proto, AnalyticMethod::HighSnrApprox).unwrap();
            let gap = ((oe - oa).abs(), (ce - ca).abs());
            if k == 1.0 {
                let (ro, rc) = (gap.0 / oe, gap.1 / ce);
                if ro > worst_outage.0 {
                    worst_outage = (ro, proto.to_string());
                }
                if rc > worst_capacity.0 {
                    worst_capacity = (rc, proto.to_string());
                }
                if ro > 0.02 {
                    breaches.push(format!("outage {proto} {:.2}%", 100.0 * ro));
                }
                if rc > 0.02 {
                    breaches.push(format!("capacity {proto} {:.2}%", 100.0 * rc));
                }
            }
            if gap.0 >= prev.0 || gap.1 >= prev.1 {
                not_shrinking.push(format!("{proto} at scale {k}"));
            }
            prev = gap;
        }
    }
    let pass = breaches.is_empty() && not_shrinking.is_empty();
    outcome(
        pass,
        format!(
            "worst outage gap {:.2}% ({}), worst capacity gap {:.2}% ({}); over 2%: [{}]; gap not shrinking: [{}]",
            100.0 * worst_outage.0,
            worst_outage.1,
            100.0 * worst_capacity.0,
            worst_capacity.1,
            breaches.join(", "),
            not_shrinking.join(", ")
        ),
    )
}

fn criterion_05_bessel_identity() -> Outcome {
    let p = SystemParams::default();
    let settings = QuadratureSettings::default();
    let gamma0 = p.snr_threshold().unwrap();
    let mut worst: f64 = 0.0;
    let mut protocols: Vec<Protocol> = FRACTIONS
        .iter()
        .flat_map(|&f| [Protocol::tsr(f).unwrap(), Protocol::psr(f).unwrap()])
        .collect();
    protocols.push(Protocol::Ideal);
    for proto in &protocols {
        let mut k = constants(&p, proto, gamma0).unwrap();
        k.b = 0.0;
        let exact = cdf_from_constants(&k, &p, AnalyticMethod::Exact, &settings)
            .unwrap()
            .value;
        let approx = outage_probability(&p, proto, AnalyticMethod::HighSnrApprox).unwrap();
        worst = worst.max(((exact - approx) / approx).abs());
    }
    outcome(worst <= 1e-6, format!("max relative difference {worst:.2e}"))
}

fn criterion_06_cdf_pdf_consistency() -> Outcome {
    let p = SystemParams::default();
    let mut worst: f64 = 0.0;
    for proto in [Protocol::tsr(0.5).unwrap(), Protocol::psr(0.5).unwrap()] {
        for g in [1.0, 7.0, 20.0] {
            let h = 1e-3 * g;
            let fd = (snr_cdf(&p, &proto, g + h).unwrap() - snr_cdf(&p, &proto, g - h).unwrap()) / (2.0 * h);
            let pdf = snr_pdf(&p, &proto, g, AnalyticMethod::Exact).unwrap();
            worst = worst.max((fd - pdf).abs());
        }
    }
    outcome(worst <= 1e-4, format!("max |finite difference - pdf| = {worst:.2e}"))
}

/// Swept value where TSR's optimal throughput minus PSR's changes sign,
/// by linear interpolation. `None` if there is no sign change.
fn crossover(parameter: SweptParameter, values: Vec<f64>) -> Option<f64> {
    let spec = SweepSpec {
        swept_parameter: parameter,
        values: values.clone(),
        protocols: vec![ProtocolFamily::Tsr, ProtocolFamily::Psr],
        modes: vec![DL],
        methods: vec![EvalMethod::Exact],
        optimize_fraction: true,
        ..Default::default()
    };
    let rows = run_sweep(&spec, &SystemParams::default(), &McSettings::default())
        .unwrap()
        .rows;
    let diff: Vec<f64> = rows
        .chunks(2)
        .map(|c| c[0].throughput.unwrap() - c[1].throughput.unwrap())
        .collect();
    (1..diff.len())
        .find(|&i| diff[i - 1] < 0.0 && diff[i] >= 0.0)
        .map(|i| values[i - 1] + (values[i] - values[i - 1]) * (-diff[i - 1]) / (diff[i] - diff[i - 1]))
}

fn criterion_07_crossovers() -> Outcome {
    let grid: Vec<f64> = (1..=20).map(|i| i as f64 * 5.0 / 1000.0).collect();
    let antenna = crossover(SweptParameter::AntennaNoiseVar, grid.clone());
    let conversion = crossover(SweptParameter::ConversionNoiseVar, grid);
    let pass =
        antenna.is_some_and(|x| (0.04..=0.08).contains(&x)) && conversion.is_some_and(|x| (0.01..=0.03).contains(&x));
    outcome(
        pass,
        format!("antenna noise crossover {antenna:?}, conversion noise crossover {conversion:?}"),
    )
}

fn criterion_08_orderings() -> Outcome {
    let base = SystemParams::default();
    let mut failures = Vec::new();
    let mut details = Vec::new();
    for mode in [DL, DT] {
        let ideal = throughput(&base, &Protocol::Ideal, mode, EvalMethod::Exact)
            .unwrap()
            .throughput;
        let tsr = optimum(&base, ProtocolFamily::Tsr, mode).best_throughput;
        let psr = optimum(&base, ProtocolFamily::Psr, mode).best_throughput;
        details.push(format!(
            "{}: ideal {ideal:.4}, TSR {tsr:.4}, PSR {psr:.4}",
            mode.as_str()
        ));
        if ideal < tsr || ideal < psr {
            failures.push(format!("ideal below optimum in {}", mode.as_str()));
        }
    }
    for family in [ProtocolFamily::Tsr, ProtocolFamily::Psr] {
        let dl = optimum(&base, family, DL).best_throughput;
        let dt = optimum(&base, family, DT).best_throughput;
        if dt < dl {
            failures.push(format!(
                "{} delay-tolerant {dt:.4} < delay-limited {dl:.4}",
                family.as_str()
            ));
        }
    }

    let d1: Vec<f64> = (5..=15).map(|i| i as f64 / 10.0).collect();
    for mode in [DL, DT] {
        for family in [ProtocolFamily::Tsr, ProtocolFamily::Psr] {
            let taus: Vec<f64> = d1
                .iter()
                .map(|&d| {
                    let p = SystemParams {
                        dist_source_relay: d,
                        dist_relay_dest: 2.0 - d,
                        ..base
                    };
                    optimum(&p, family, mode).best_throughput
                })
                .collect();
            for i in 1..taus.len() {
                if taus[i] > taus[i - 1] {
                    failures.push(format!(
                        "{} {} optimum rises from d1={} ({:.4}) to d1={} ({:.4})",
                        family.as_str(),
                        mode.as_str(),
                        d1[i - 1],
                        taus[i - 1],
                        d1[i],
                        taus[i]
                    ));
                }
            }
            // d1 = 1.2 sits at index 7
            let variation: f64 = (8..taus.len()).map(|i| (taus[i] - taus[i - 1]).abs()).sum();
            let share = variation / taus[7];
            details.push(format!(
                "{} {} variation over [1.2, 1.5] {:.1}%",
                family.as_str(),
                mode.as_str(),
                100.0 * share
            ));
            if share > 0.10 {
                failures.push(format!(
                    "{} {} varies {:.1}% beyond d1 = 1.2",
                    family.as_str(),
                    mode.as_str(),
                    100.0 * share
                ));
            }
        }
    }
    outcome(
        failures.is_empty(),
        format!("{}; violations: [{}]", details.join("; "), failures.join("; ")),
    )
}

/// At most one change from rising to falling.
fn unimodal(xs: &[f64]) -> bool {
    let mut falling = false;
    for w in xs.windows(2) {
        if w[1] < w[0] {
            falling = true;
        } else if falling && w[1] > w[0] {
            return false;
        }
    }
    true
}

fn criterion_09_rate_sweep() -> Outcome {
    let mut curves = Vec::new();
    for family in [ProtocolFamily::Tsr, ProtocolFamily::Psr] {
        let taus: Vec<f64> = (1..=8)
            .map(|r| {
                let p = SystemParams {
                    rate: r as f64,
                    ..Default::default()
                };
                optimum(&p, family, DL).best_throughput
            })
            .collect();
        curves.push(taus);
    }
    let (tsr, psr) = (&curves[0], &curves[1]);
    let pass = unimodal(tsr) && unimodal(psr) && psr[0] > tsr[0] && tsr[6] > psr[6];
    outcome(
        pass,
        format!(
            "R=1: PSR {:.4} vs TSR {:.4}; R=7: TSR {:.4} vs PSR {:.4}; unimodal TSR {}, PSR {}",
            psr[0],
            tsr[0],
            tsr[6],
            psr[6],
            unimodal(tsr),
            unimodal(psr)
        ),
    )
}

fn criterion_10_boundaries_and_sanity() -> Outcome {
    let base = SystemParams::default();
    let mut problems = Vec::new();
    let methods = [EvalMethod::Exact, EvalMethod::HighSnrApprox, EvalMethod::MonteCarlo];
    for proto in [
        Protocol::tsr(0.0).unwrap(),
        Protocol::tsr(1.0).unwrap(),
        Protocol::psr(0.0).unwrap(),
        Protocol::psr(1.0).unwrap(),
    ] {
        for mode in [DL, DT] {
            for m in methods {
                let tau = throughput(&base, &proto, mode, m).unwrap().throughput;
                if tau != 0.0 {
                    problems.push(format!("tau = {tau} for {proto} {} {m}", mode.as_str()));
                }
            }
        }
    }
    for proto in [
        Protocol::tsr(0.0).unwrap(),
        Protocol::psr(0.0).unwrap(),
        Protocol::psr(1.0).unwrap(),
    ] {
        for m in [AnalyticMethod::Exact, AnalyticMethod::HighSnrApprox] {
            let po = outage_probability(&base, &proto, m).unwrap();
            let c = ergodic_capacity(&base, &proto, m).unwrap();
            if po != 1.0 || c != 0.0 {
                problems.push(format!("{proto} {}: outage {po}, capacity {c}", m.as_str()));
            }
        }
    }

    // every cell of every preset, with a light Monte-Carlo budget
    let mc = McSettings {
        num_realizations: 4000,
        ..Default::default()
    };
    let mut cells = 0;
    for name in PRESET_NAMES {
        let spec = figure_preset(name).unwrap();
        let result = run_sweep(&spec, &base, &mc).unwrap();
        for row in &result.rows {
            cells += 1;
            let prob_ok = row.p_out.is_none_or(|p| (0.0..=1.0).contains(&p));
            let finite = [row.fraction, row.capacity, row.throughput, row.stderr]
                .iter()
                .flatten()
                .all(|x| x.is_finite() && *x >= 0.0);
            if row.failed() || !prob_ok || !finite {
                problems.push(format!("{name}: {row:?}"));
            }
        }
    }
    outcome(
        problems.is_empty(),
        format!("{cells} preset cells checked; problems: [{}]", problems.join("; ")),
    )
}

type Criterion = (u32, &'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        (1, "optimal alpha", criterion_01_optimal_alpha),
        (2, "optimal rho", criterion_02_optimal_rho),
        (3, "analytic vs Monte-Carlo", criterion_03_analytic_matches_monte_carlo),
        (
            4,
            "high-SNR approximation fidelity",
            criterion_04_approximation_fidelity,
        ),
        (5, "Bessel identity with b = 0", criterion_05_bessel_identity),
        (6, "CDF/PDF consistency", criterion_06_cdf_pdf_consistency),
        (7, "TSR/PSR crossovers", criterion_07_crossovers),
        (8, "ordering properties", criterion_08_orderings),
        (9, "rate sweep shape", criterion_09_rate_sweep),
        (
            10,
            "boundaries and numerical sanity",
            criterion_10_boundaries_and_sanity,
        ),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    let mut ran = 0;
    for (id, title, run) in criteria {
        let name = format!("criterion_{id:02}");
        if !filter.is_empty()
            && !filter
                .iter()
                .any(|f| name.contains(f.as_str()) || title.contains(f.as_str()))
        {
            continue;
        }
        ran += 1;
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|_| outcome(false, "panicked"));
        let verdict = if result.pass { "PASS" } else { "FAIL" };
        println!(
            "criterion {id:>2} [{verdict}] {title} ({:.1?}): {}",
            start.elapsed(),
            result.detail
        );
        if !result.pass {
            failed += 1;
        }
    }
    println!("acceptance: {} of {ran} criteria passed", ran - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
