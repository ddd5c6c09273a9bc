//! Truncated bivariate polynomials in `(g, E)` with rational coefficients.

use rug::Rational;

/// `sum_{l, p} c[l][p] g^l E^p`, known through `g^known_order`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bivariate {
    terms: Vec<Vec<Rational>>,
    known_order: usize,
}

impl Bivariate {
    /// `terms[l][p]` multiplies `g^l E^p`. Rows beyond `known_order` are dropped.
    pub fn new(mut terms: Vec<Vec<Rational>>, known_order: usize) -> Self {
        terms.resize(known_order + 1, Vec::new());
        Self { terms, known_order }
    }

    /// `D(E, g) = E + g (3E^2 + 1/4) + g^2 (35E^3 + 25E/4) + O(g^3)`.
    pub fn double_well_d() -> Self {
        Self::new(
            vec![
                vec![q(0, 1), q(1, 1)],
                vec![q(1, 4), q(0, 1), q(3, 1)],
                vec![q(0, 1), q(25, 4), q(0, 1), q(35, 1)],
            ],
            2,
        )
    }

    /// Regular part of `A(E, g)`, i.e. `A - 1/(3g)`:
    /// `g (17E^2 + 19/12) + g^2 (227E^3 + 187E/4) + O(g^3)`.
    pub fn double_well_a_regular() -> Self {
        Self::new(
            vec![
                vec![],
                vec![q(19, 12), q(0, 1), q(17, 1)],
                vec![q(0, 1), q(187, 4), q(0, 1), q(227, 1)],
            ],
            2,
        )
    }

    /// `D(E, g) = E`, known exactly through `g^known_order`.
    pub fn identity_d(known_order: usize) -> Self {
        Self::new(vec![vec![q(0, 1), q(1, 1)]], known_order)
    }

    pub fn known_order(&self) -> usize {
        self.known_order
    }

    pub fn coeff(&self, l: usize, p: usize) -> Rational {
        self.terms.get(l).and_then(|row| row.get(p)).cloned().unwrap_or_default()
    }

    /// Degree in `E` of the `g^l` row (zero for an empty row).
    pub fn degree_in_e(&self, l: usize) -> usize {
        self.terms
            .get(l)
            .and_then(|row| row.iter().rposition(|c| *c != 0))
            .unwrap_or(0)
    }

    pub fn max_degree_in_e(&self) -> usize {
        (0..=self.known_order).map(|l| self.degree_in_e(l)).max().unwrap_or(0)
    }

    /// Partial derivative with respect to `E`.
    pub fn derivative_e(&self) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .skip(1)
                    .map(|(p, c)| Rational::from(c * p as u32))
                    .collect()
            })
            .collect();
        Self { terms, known_order: self.known_order }
    }

    /// Substitutes `E = sum_l e[l] g^l` and returns the coefficients of
    /// `g^0 .. g^upto`. Entries of `e` beyond its length count as zero.
    pub fn compose_in_e(&self, e: &[Rational], upto: usize) -> Vec<Rational> {
        let mut out = vec![Rational::new(); upto + 1];
        // Powers of the E-series, truncated at g^upto.
        let mut power = vec![Rational::new(); upto + 1];
        power[0] = Rational::from(1);
        for p in 0..=self.max_degree_in_e() {
            for (l, row) in self.terms.iter().enumerate().take(upto + 1) {
                if let Some(c) = row.get(p) {
                    if *c == 0 {
                        continue;
                    }
                    for i in 0..=upto - l {
                        if power[i] != 0 {
                            out[l + i] += Rational::from(c * &power[i]);
                        }
                    }
                }
            }
            power = mul_truncated(&power, e, upto);
        }
        out
    }
}

/// Product of two coefficient lists truncated after index `upto`.
pub fn mul_truncated(a: &[Rational], b: &[Rational], upto: usize) -> Vec<Rational> {
    let mut out = vec![Rational::new(); upto + 1];
    for (i, x) in a.iter().enumerate().take(upto + 1) {
        if *x == 0 {
            continue;
        }
        for (j, y) in b.iter().enumerate().take(upto + 1 - i) {
            if *y != 0 {
                out[i + j] += Rational::from(x * y);
            }
        }
    }
    out
}

fn q(n: i64, d: i64) -> Rational {
    Rational::from((n, d))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compose_constant_e() {
        let d = Bivariate::double_well_d();
        // E = 1/2: D = 1/2 + g (3/4 + 1/4) + g^2 (35/8 + 25/8)
        let v = d.compose_in_e(&[q(1, 2)], 2);
        assert_eq!(v, vec![q(1, 2), q(1, 1), q(15, 2)]);
    }

    #[test]
    fn derivative() {
        let d = Bivariate::double_well_d().derivative_e();
        assert_eq!(d.coeff(0, 0), q(1, 1));
        assert_eq!(d.coeff(1, 1), q(6, 1));
        assert_eq!(d.coeff(2, 2), q(105, 1));
        assert_eq!(d.coeff(2, 0), q(25, 4));
    }
}
