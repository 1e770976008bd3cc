//! Small special-function helpers: factorials, binomials and Legendre polynomials.

/// `ln(n!)` for `n = 0..len`.
pub fn ln_factorials(len: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(len);
    let mut acc = 0.0;
    for n in 0..len {
        if n > 1 {
            acc += (n as f64).ln();
        }
        out.push(acc);
    }
    out
}

/// Binomial coefficient as a float, by multiplicative accumulation.
pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc = 1.0;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc
}

/// Legendre polynomial Pₙ(x) by the three-term recurrence
///
/// ```text
/// (k+1) P_{k+1}(x) = (2k+1) x P_k(x) - k P_{k-1}(x)
/// ```
///
/// Forward recurrence is stable for `x >= 1`, which is the only regime the
/// fidelity formulas need.
pub fn legendre_p(n: usize, x: f64) -> f64 {
    let (mut prev, mut cur) = (1.0, x);
    if n == 0 {
        return prev;
    }
    for k in 1..n {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0) * x * cur - kf * prev) / (kf + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// `zⁿ Pₙ(y)` evaluated through the rescaled recurrence
///
/// ```text
/// (k+1) Q_{k+1} = (2k+1) (y z) Q_k - k z² Q_{k-1},   Q_k = z^k P_k(y)
/// ```
///
/// which stays finite when `y → ∞` with `y z` bounded.
pub fn scaled_legendre(n: usize, yz: f64, z: f64) -> f64 {
    let (mut prev, mut cur) = (1.0, yz);
    if n == 0 {
        return prev;
    }
    let z2 = z * z;
    for k in 1..n {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0) * yz * cur - kf * z2 * prev) / (kf + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}
