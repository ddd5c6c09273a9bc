//! Gauss–Legendre rules at arbitrary precision.

use rug::Float;

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[-1, 1]`,
/// accurate to the requested binary precision.
pub fn gauss_legendre(n: usize, bits: u32) -> Vec<(Float, Float)> {
    assert!(n >= 1);
    let work = bits + 32;
    let mut rule = Vec::with_capacity(n);
    for i in 0..n {
        // Tricomi's initial approximation of the i-th root.
        let guess = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut x = Float::with_val(work, guess);
        let mut derivative = Float::new(work);
        for _ in 0..200 {
            let (p, dp) = legendre_with_derivative(n, &x);
            let step = Float::with_val(work, &p / &dp);
            x -= &step;
            derivative = dp;
            let tiny = step.is_zero()
                || step.get_exp().map_or(true, |e| e < x.get_exp().unwrap_or(0) - work as i32 + 4);
            if tiny {
                let (_, dp) = legendre_with_derivative(n, &x);
                derivative = dp;
                break;
            }
        }
        let one_minus_x2 = Float::with_val(work, 1) - Float::with_val(work, x.square_ref());
        let weight = Float::with_val(work, 2) / (one_minus_x2 * Float::with_val(work, derivative.square_ref()));
        rule.push((Float::with_val(bits, &x), Float::with_val(bits, &weight)));
    }
    rule
}

fn legendre_with_derivative(n: usize, x: &Float) -> (Float, Float) {
    let prec = x.prec();
    let mut p_prev = Float::with_val(prec, 1);
    let mut p = x.clone();
    for k in 2..=n {
        let next = (Float::with_val(prec, x * &p) * (2 * k - 1) as u32 - Float::with_val(prec, &p_prev * (k - 1) as u32))
            / k as u32;
        p_prev = std::mem::replace(&mut p, next);
    }
    if n == 0 {
        return (Float::with_val(prec, 1), Float::new(prec));
    }
    // P_n'(x) = n (x P_n - P_{n-1}) / (x^2 - 1)
    let num = Float::with_val(prec, x * &p) - &p_prev;
    let den = Float::with_val(prec, x.square_ref()) - 1u32;
    let dp = num * n as u32 / den;
    (p, dp)
}
