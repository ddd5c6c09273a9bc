use dwell::borel::{borel_transform, lateral_laplace, pade_approximant, real_borel_sum_with_order, Side};
use dwell::exact_series::{bender_wu_coefficients, RationalSeries};
use dwell::instanton::{separation_series, EpsilonTable, Parity};
use dwell::precision::{bits_for_digits, parse_exact, Coupling};
use dwell::resurgence::derive_epsilon_table;
use dwell::spectral::{basis_energies, eigenvalue, splitting_and_mean, Method, SolverConfig};
use proptest::prelude::*;
use rug::ops::Pow;
use rug::{Float, Rational};
use std::sync::OnceLock;

fn coupling(s: &str) -> Coupling {
    s.parse().unwrap()
}

fn ground_series() -> &'static RationalSeries {
    static SERIES: OnceLock<RationalSeries> = OnceLock::new();
    SERIES.get_or_init(|| bender_wu_coefficients(0, 160))
}

fn rel(a: &Float, b: &Float) -> f64 {
    (Float::with_val(a.prec(), a - b) / b).to_f64().abs()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn coupling_round_trips(num in 1u32..100_000, den in 1u32..100_000) {
        let g = Coupling::new(Rational::from((num, den))).unwrap();
        let back: Coupling = g.to_string().parse().unwrap();
        prop_assert_eq!(back, g);
    }

    #[test]
    fn decimal_parse_is_exact(mantissa in 1u64..10_000_000, exp in -12i32..4) {
        let parsed = parse_exact(&format!("{mantissa}e{exp}")).unwrap();
        let mut expected = Rational::from(mantissa);
        if exp >= 0 {
            expected *= Rational::from(10u32).pow(exp as u32);
        } else {
            expected /= Rational::from(10u32).pow((-exp) as u32);
        }
        prop_assert_eq!(parsed, expected);
    }

    #[test]
    fn series_text_round_trips(level in 0u32..6, k_max in 0u32..25) {
        let s = bender_wu_coefficients(level, k_max);
        let back = RationalSeries::from_text("g", &s.to_text()).unwrap();
        prop_assert_eq!(back, s);
    }

    #[test]
    fn coefficients_alternate_after_zeroth(level in 0u32..4, k in 1usize..40) {
        let s = bender_wu_coefficients(level, 40);
        prop_assert!(*s.coeff(k) < 0);
    }

    #[test]
    fn derived_tables_respect_parity(level in 0u32..4) {
        let table = derive_epsilon_table(level, 2, 2).unwrap();
        prop_assert!(table.parity_relation_holds());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn lateral_sums_are_conjugate(thousandths in 5u32..200) {
        let g = Coupling::new(Rational::from((thousandths, 1000))).unwrap();
        let digits = 25;
        let transform = borel_transform(&ground_series().truncated(60));
        let pade = pade_approximant(&transform, 30, 30, digits).unwrap();
        let above = lateral_laplace(&pade, &g, Side::Above, digits).unwrap();
        let below = lateral_laplace(&pade, &g, Side::Below, digits).unwrap();
        let tol = Float::with_val(bits_for_digits(digits), 10u32).pow(-(digits as i32));
        let re = Float::with_val(128, above.value.real() - below.value.real()).abs();
        let im = Float::with_val(128, above.value.imag() + below.value.imag()).abs();
        prop_assert!(re < tol, "real parts differ by {re}");
        prop_assert!(im < tol, "imaginary parts not opposite: {im}");
    }
}

#[test]
fn tabulated_parity_relation() {
    assert!(EpsilonTable::ground_doublet().parity_relation_holds());
}

#[test]
fn borel_pade_stability() {
    let g = coupling("0.01");
    let transform = borel_transform(ground_series());
    let high = real_borel_sum_with_order(&transform, 80, 80, &g, 50).unwrap();
    let low = real_borel_sum_with_order(&transform, 60, 60, &g, 50).unwrap();
    let diff = Float::with_val(256, &high.value - &low.value).abs();
    assert!(diff < 1e-40, "Padé 60 and 80 differ by {diff}");
}

#[test]
fn variational_monotonicity() {
    let g = coupling("0.01");
    for parity in [Parity::Plus, Parity::Minus] {
        let config = SolverConfig::new(30, &g);
        let energies = basis_energies(0, parity, &g, &config).unwrap();
        assert!(energies.len() >= 3);
        for pair in energies.windows(2) {
            assert!(pair[0].0 < pair[1].0);
            assert!(pair[1].1 <= pair[0].1, "{parity:?}: E({}) > E({})", pair[1].0, pair[0].0);
        }
    }
}

#[test]
fn parity_ordering() {
    for (g, method) in [("0.005", Method::Basis), ("0.01", Method::Basis), ("0.1", Method::Lattice)] {
        let g = coupling(g);
        let config = SolverConfig::new(20, &g);
        let p0 = eigenvalue(0, Parity::Plus, &g, method, &config).unwrap();
        let m0 = eigenvalue(0, Parity::Minus, &g, method, &config).unwrap();
        let p1 = eigenvalue(1, Parity::Plus, &g, method, &config).unwrap();
        assert!(p0.energy < m0.energy, "g = {g}");
        assert!(m0.energy < p1.energy, "g = {g}");
    }
}

#[test]
fn method_agreement() {
    for g in ["0.005", "0.007", "0.01", "0.1"] {
        let g = coupling(g);
        let config = SolverConfig::new(20, &g);
        for parity in [Parity::Plus, Parity::Minus] {
            let b = eigenvalue(0, parity, &g, Method::Basis, &config).unwrap();
            let l = eigenvalue(0, parity, &g, Method::Lattice, &config).unwrap();
            let diff = Float::with_val(b.energy.prec(), &b.energy - &l.energy).abs();
            let tol = Float::with_val(64, &b.error + &l.error) + 1e-20;
            assert!(diff <= tol, "g = {g} {parity:?}: basis and lattice differ by {diff}");
        }
    }
}

#[test]
fn one_instanton_dominance() {
    // The remainder after g^2 should scale like g^3.
    let mut scaled = Vec::new();
    for g in ["0.005", "0.01"] {
        let g = coupling(g);
        let config = SolverConfig::new(30, &g);
        let doublet = splitting_and_mean(&g, Method::Basis, &config).unwrap();
        let predicted = separation_series(&g, 2, 30).unwrap();
        let r = rel(&doublet.splitting.value, &predicted);
        scaled.push(r / g.to_float(64).to_f64().powi(3));
    }
    let ratio = scaled[0] / scaled[1];
    assert!((0.5..2.0).contains(&ratio), "remainder / g^3: {scaled:?}");
}

#[test]
fn splitting_keeps_relative_accuracy() {
    let g = coupling("0.005");
    let config = SolverConfig::new(30, &g);
    let doublet = splitting_and_mean(&g, Method::Basis, &config).unwrap();
    let rel_error = Float::with_val(64, &doublet.splitting.error / &doublet.splitting.value).to_f64();
    // 30 absolute digits on a splitting near 1e-15.
    assert!(rel_error < 1e-12, "relative error {rel_error}");
}
