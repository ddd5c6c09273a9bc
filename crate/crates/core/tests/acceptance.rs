//! One test per acceptance criterion. Each prints a `criterion N: PASS` or
//! `criterion N: FAIL` line (run with `--nocapture` to see them) and then
//! asserts. Criterion 8 is ignored by default; run it with
//! `cargo test --release --test acceptance -- --ignored --nocapture`.

use std::sync::OnceLock;
use std::time::{Duration, Instant};

use dwell::asymptotics::growth_coefficients;
use dwell::borel::{borel_transform, direct_sum, lateral_laplace, pade_approximant, real_borel_sum, Side};
use dwell::exact_series::{bender_wu_coefficients, coefficient_decimal, RationalSeries};
use dwell::instanton::{
    compute_delta, delta_asymptotic, instanton_energy, separation_series, DeltaForm, EpsilonTable, Parity, MAX_G_ORDER,
};
use dwell::precision::{to_fixed, to_sci, Coupling};
use dwell::resurgence::derive_epsilon_table;
use dwell::spectral::{eigenvalue, splitting_and_mean, Method, SolverConfig};
use rug::ops::Pow;
use rug::{Float, Rational};

const GRID: [&str; 6] = ["0.005", "0.006", "0.007", "0.008", "0.009", "0.01"];

struct Timed {
    series: RationalSeries,
    elapsed: Duration,
}

fn coefficients() -> &'static Timed {
    static SERIES: OnceLock<Timed> = OnceLock::new();
    SERIES.get_or_init(|| {
        let start = Instant::now();
        let series = bender_wu_coefficients(0, 200);
        Timed { series, elapsed: start.elapsed() }
    })
}

fn g(s: &str) -> Coupling {
    s.parse().unwrap()
}

fn report(criterion: u32, failures: &[String], summary: &str) {
    if failures.is_empty() {
        println!("criterion {criterion}: PASS ({summary})");
    } else {
        println!("criterion {criterion}: FAIL ({summary})");
        for f in failures {
            println!("  {f}");
        }
    }
    assert!(failures.is_empty(), "criterion {criterion} failed: {failures:?}");
}

fn abs_diff(a: &Float, b: &Float) -> f64 {
    Float::with_val(a.prec().max(b.prec()), a - b).abs().to_f64()
}

#[test]
fn criterion_1_exact_coefficients() {
    let timed = coefficients();
    let s = &timed.series;
    let mut failures = Vec::new();
    if timed.elapsed > Duration::from_secs(600) {
        failures.push(format!("K <= 200 took {:?}", timed.elapsed));
    }
    for (k, expected) in [(1, Rational::from(-1)), (2, Rational::from((-9, 2)))] {
        if *s.coeff(k) != expected {
            failures.push(format!("E_{k} = {} expected {expected}", s.coeff(k)));
        }
    }
    let magnitudes = [
        (198, "5.501177696288587935277569438632e464"),
        (199, "3.284453984165780006162191232835e467"),
        (200, "1.970821419309543769795300607410e470"),
    ];
    for (k, expected) in magnitudes {
        let c = s.coeff(k);
        let printed = coefficient_decimal(&Rational::from(c.abs_ref()), 31);
        if printed != expected || *c >= 0 {
            failures.push(format!("E_{k}: {printed}, sign {}", if *c < 0 { "-" } else { "+" }));
        }
    }
    report(1, &failures, &format!("K <= 200 in {:.1?}", timed.elapsed));
}

#[test]
fn criterion_2_growth_constants() {
    let r = growth_coefficients(&coefficients().series, (160, 200), None, 40).unwrap();
    let targets = [
        ("a0", &r.a0, Rational::from(1), 1e-20),
        ("a1", &r.a1, Rational::from((-53, 18)), 1e-15),
        ("a2", &r.a2, Rational::from((-1277, 648)), 1e-10),
    ];
    let mut failures = Vec::new();
    let mut summary = Vec::new();
    for (name, value, exact, tol) in targets {
        let err = Float::with_val(value.prec(), value - &exact).abs().to_f64();
        summary.push(format!("{name} off by {err:.1e}"));
        if !(err < tol) {
            failures.push(format!("{name} = {} differs from {exact} by {err:.2e} > {tol:.0e}", to_sci(value, 25)));
        }
    }
    report(2, &failures, &summary.join(", "));
}

#[test]
fn criterion_3_asymptotic_delta() {
    let expected = ["1.00640", "1.00739", "1.00832", "1.00919", "1.01001", "1.01078"];
    let mut failures = Vec::new();
    for (gs, want) in GRID.iter().zip(expected) {
        let value = delta_asymptotic(&g(gs), MAX_G_ORDER, DeltaForm::Composed, 30).unwrap();
        let got = to_fixed(&value, 5);
        if got != want {
            failures.push(format!("g = {gs}: {got} expected {want}"));
        }
    }
    let inverse = to_fixed(&delta_asymptotic(&g("0.1"), MAX_G_ORDER, DeltaForm::InverseLog, 30).unwrap(), 5);
    if inverse != "0.86029" {
        failures.push(format!("g = 0.1 inverse-log form: {inverse} expected 0.86029"));
    }
    report(3, &failures, "six grid couplings and g = 0.1 to five decimals");
}

#[test]
fn criterion_4_numeric_delta() {
    let expected = [
        ("0.005", 1.0063, 5e-4),
        ("0.006", 1.0075, 5e-4),
        ("0.007", 1.00832, 5e-4),
        ("0.008", 1.00919, 5e-4),
        ("0.009", 1.00998, 5e-4),
        ("0.01", 1.01078, 5e-4),
        ("0.1", 0.87684, 2e-4),
    ];
    let series = &coefficients().series;
    let start = Instant::now();
    let mut failures = Vec::new();
    let mut rows = Vec::new();
    for (gs, want, tol) in expected {
        let coupling = g(gs);
        let r = compute_delta(&coupling, series, Method::for_coupling(&coupling), 60).unwrap();
        let value = r.delta.value.to_f64();
        rows.push(format!("{gs}: {value:.7}"));
        if r.low_confidence {
            failures.push(format!("g = {gs}: low confidence, error {}", to_sci(&r.delta.error, 2)));
        }
        if !((value - want).abs() <= tol) {
            failures.push(format!("g = {gs}: {value:.7} outside {want} +- {tol:.0e}"));
        }
    }
    let elapsed = start.elapsed();
    if elapsed > Duration::from_secs(1800) {
        failures.push(format!("grid took {elapsed:?}"));
    }
    report(4, &failures, &format!("{} in {elapsed:.1?}", rows.join(", ")));
}

#[test]
fn criterion_5_one_instanton_splitting() {
    let coupling = g("0.005");
    let config = SolverConfig::new(60, &coupling);
    let doublet = splitting_and_mean(&coupling, Method::Basis, &config).unwrap();
    let predicted = separation_series(&coupling, 2, 60).unwrap();
    let ratio = Float::with_val(predicted.prec(), &doublet.splitting.value / &predicted);
    let off = (ratio.to_f64() - 1.0).abs();
    let failures = if off < 1e-4 { vec![] } else { vec![format!("ratio {} off by {off:.2e}", to_sci(&ratio, 12))] };
    report(5, &failures, &format!("splitting / one-instanton = 1 - {off:.2e}"));
}

#[test]
fn criterion_6_resurgence_table() {
    let derived = derive_epsilon_table(0, 2, 2).unwrap();
    let reference = EpsilonTable::ground_doublet();
    let mut failures = Vec::new();
    for (key, value) in reference.iter() {
        match derived.get(key) {
            Some(v) if v == value => {}
            other => failures.push(format!("{key:?}: derived {other:?}, tabulated {value}")),
        }
    }
    if derived.len() != reference.len() {
        failures.push(format!("derived {} entries, tabulated {}", derived.len(), reference.len()));
    }
    report(6, &failures, &format!("{} entries", reference.len()));
}

#[test]
fn criterion_7_borel_properties() {
    let series = &coefficients().series;
    let mut failures = Vec::new();

    let digits = 40;
    let coupling = g("0.01");
    let transform = borel_transform(series);
    let pade = pade_approximant(&transform, 80, 80, digits).unwrap();
    let above = lateral_laplace(&pade, &coupling, Side::Above, digits).unwrap();
    let below = lateral_laplace(&pade, &coupling, Side::Below, digits).unwrap();
    let re = abs_diff(above.value.real(), below.value.real());
    let im = Float::with_val(256, above.value.imag() + below.value.imag()).abs().to_f64();
    let tol = 10f64.powi(-(digits as i32));
    if !(re < tol && im < tol) {
        failures.push(format!("lateral sums not conjugate: real {re:.2e}, imaginary {im:.2e}"));
    }

    let geometric: Vec<Rational> = (0..=80).map(|k| Rational::from((1, 2)).pow(k)).collect();
    let geometric = RationalSeries::new("g", geometric).unwrap();
    let small = g("0.2");
    let summed = real_borel_sum(&geometric, &small, 40).unwrap();
    let exact = Float::with_val(256, direct_sum(&geometric, &small));
    let convergent = abs_diff(&summed.value, &exact);
    if !(convergent < 1e-30) {
        failures.push(format!("geometric series: Borel sum off direct sum by {convergent:.2e}"));
    }

    let singularity = transform.singularity().map(|s| (s.distance.to_f64(), s.on_positive_axis));
    match singularity {
        Some((d, true)) if (d - 1.0 / 3.0).abs() < 1e-3 => {}
        other => failures.push(format!("singularity estimate {other:?}, expected 1/3 on the positive axis")),
    }

    let table = EpsilonTable::ground_doublet();
    let two = instanton_energy(&table, 0, Parity::Plus, 2, &coupling, Side::Above, MAX_G_ORDER, digits).unwrap();
    let borel_im = above.value.imag().to_f64();
    let inst_im = two.imag().to_f64();
    let cancel = ((borel_im + inst_im) / inst_im).abs();
    if !(cancel < 0.05) {
        failures.push(format!("Im Borel {borel_im:.6e} vs two-instanton {inst_im:.6e}: residual {cancel:.2e}"));
    }

    report(
        7,
        &failures,
        &format!("conjugacy {re:.0e}/{im:.0e}, geometric {convergent:.0e}, singularity {singularity:?}, Im cancellation {cancel:.2e}"),
    );
}

#[test]
#[ignore = "extended run, about a minute in release"]
fn criterion_8_extended_coupling() {
    let coupling = g("0.001");
    let config = SolverConfig::new(85, &coupling);
    let plus = eigenvalue(0, Parity::Plus, &coupling, Method::Basis, &config).unwrap();
    let minus = eigenvalue(0, Parity::Minus, &coupling, Method::Basis, &config).unwrap();
    let mut failures = Vec::new();
    let e_plus = to_sci(&plus.energy, 40);
    if e_plus != "4.989954548621091716891308394819216368209e-1" {
        failures.push(format!("E_0+ = {e_plus}"));
    }
    let splitting = Float::with_val(plus.energy.prec(), &minus.energy - &plus.energy) * Float::with_val(64, 10u32).pow(71u32);
    let scaled = to_sci(&splitting, 10);
    if scaled != "1.470464454e0" {
        failures.push(format!("splitting x 1e71 = {}", to_sci(&splitting, 20)));
    }
    report(8, &failures, &format!("E_0+ = {e_plus}, splitting x 1e71 = {}", to_sci(&splitting, 16)));
}
