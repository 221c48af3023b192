//! Order-by-order solution of the conjugacy equation `f(P(u, v)) = P(r1 u, r2 v)`.
//!
//! Writing `P = sum a^{nm} u^n v^m` and matching coefficients gives, for each block
//! `(n, m)` with `L = r1^n r2^m`,
//!
//! ```text
//! a2 = L a1,   a3 = L a2,   a4 = L a3,
//! -a1 - a2/A + 2 a3/A - (1/A + L) a4 = (1/(eps A)) [a3^3]_{nm}
//! ```
//!
//! so `a1 = R / D(L)` with `D(L) = -k0(L)`, `k0` the characteristic polynomial at the
//! origin. Because `a3^{00} = 0`, the cube coefficient at total degree `d` only involves
//! blocks of degree `<= d - 2`, and the recursion is triangular in total degree.

use crate::error::{Error, Result};

/// Relative tolerance of the non-resonance test `|k0(L)| > tol * max(1, |L|^4)`.
pub const RESONANCE_TOL: f64 = 1e-8;

/// Position of block `(n, m)` in a table ordered by total degree, then by `m`.
#[inline]
pub fn tri_index(n: usize, m: usize) -> usize {
    let d = n + m;
    d * (d + 1) / 2 + m
}

/// Number of blocks with total degree `<= order`.
#[inline]
pub fn tri_len(order: usize) -> usize {
    (order + 1) * (order + 2) / 2
}

/// `[a3^3]_{nm}` written as the literal quadruple sum
/// `sum_{i<=n} sum_{j<=m} sum_{k<=i} sum_{l<=j} a3^{n-i,m-j} a3^{i-k,j-l} a3^{k,l}`.
///
/// `a3` is indexed with [`tri_index`] and must hold every block of degree `<= n + m`.
pub fn cubic_convolution(a3: &[f64], n: usize, m: usize) -> f64 {
    let at = |p: usize, q: usize| a3[tri_index(p, q)];
    let mut total = 0.0;
    for i in 0..=n {
        for j in 0..=m {
            let outer = at(n - i, m - j);
            if outer == 0.0 {
                continue;
            }
            for k in 0..=i {
                for l in 0..=j {
                    total += outer * at(i - k, j - l) * at(k, l);
                }
            }
        }
    }
    total
}

/// `k0(L) / max(1, |L|)^4`, evaluated without overflow for large rates.
fn scaled_k0(rate: f64, inv_a: f64) -> f64 {
    let (a, b) = (inv_a, -2.0 * inv_a);
    if rate.abs() <= 1.0 {
        (((rate + a) * rate + b) * rate + a) * rate + 1.0
    } else {
        let r = 1.0 / rate;
        (((r + a) * r + b) * r + a) * r + 1.0
    }
}

/// Solves the four equations of one block given the forcing `R = [a3^3]_{nm} / (eps A)`.
///
/// Returns `(a1, a2, a3, a4)`. For `|L| > 1` the chain is run backwards from `a4` so that
/// unstable-branch blocks never form `L^4`.
pub fn solve_order_block(rate: f64, a: f64, forcing: f64, n: usize, m: usize) -> Result<[f64; 4]> {
    let inv_a = 1.0 / a;
    let k = scaled_k0(rate, inv_a);
    if k.abs() <= RESONANCE_TOL {
        return Err(Error::Resonance { n, m, value: k });
    }
    if forcing == 0.0 {
        return Ok([0.0; 4]);
    }
    if rate.abs() <= 1.0 {
        let a1 = forcing / -k;
        let a2 = rate * a1;
        let a3 = rate * a2;
        Ok([a1, a2, a3, rate * a3])
    } else {
        // a4 = R L^3 / D(L) = R / (-k0(L)/L^3) and k0(L)/L^3 = L * scaled_k0
        let a4 = forcing / -(k * rate);
        let a3 = a4 / rate;
        let a2 = a3 / rate;
        Ok([a2 / rate, a2, a3, a4])
    }
}

/// Residuals of the four block equations, used by tests and diagnostics.
pub fn block_residuals(rate: f64, a: f64, forcing: f64, block: [f64; 4]) -> [f64; 4] {
    let [a1, a2, a3, a4] = block;
    [
        -rate * a1 + a2,
        -rate * a2 + a3,
        -rate * a3 + a4,
        -a1 - a2 / a + 2.0 * a3 / a - (1.0 / a + rate) * a4 - forcing,
    ]
}

/// Computes all blocks up to total degree `order` for rates `(r1, r2)` and first-order
/// blocks `first = (a^{10}, a^{01})`.
pub(crate) fn build_coefficients(
    eps_a: f64,
    a: f64,
    rates: [f64; 2],
    first: [[f64; 4]; 2],
    order: usize,
) -> Result<Vec<[f64; 4]>> {
    let len = tri_len(order);
    let mut coeffs = vec![[0.0; 4]; len];
    if order == 0 {
        return Ok(coeffs);
    }
    coeffs[tri_index(1, 0)] = first[0];
    coeffs[tri_index(0, 1)] = first[1];

    let mut a3 = vec![0.0; len];
    let mut sq = vec![0.0; len];
    a3[tri_index(1, 0)] = first[0][2];
    a3[tri_index(0, 1)] = first[1][2];

    // powers of the rates, so that L = r1^n r2^m is formed by one multiplication
    let pow = |r: f64| {
        let mut p = vec![1.0; order + 1];
        for k in 1..=order {
            p[k] = p[k - 1] * r;
        }
        p
    };
    let (p1, p2) = (pow(rates[0]), pow(rates[1]));

    for d in 2..=order {
        // square of a3 at degree d - 1 (both factors of degree >= 1)
        let e = d - 1;
        for n in 0..=e {
            let m = e - n;
            let mut s = 0.0;
            for i in 0..=n {
                for j in 0..=m {
                    let (di, dr) = (i + j, e - i - j);
                    if di == 0 || dr == 0 {
                        continue;
                    }
                    s += a3[tri_index(i, j)] * a3[tri_index(n - i, m - j)];
                }
            }
            sq[tri_index(n, m)] = s;
        }
        for n in 0..=d {
            let m = d - n;
            let mut cube = 0.0;
            for i in 0..=n {
                for j in 0..=m {
                    let (di, dr) = (i + j, d - i - j);
                    if di == 0 || dr < 2 {
                        continue;
                    }
                    cube += a3[tri_index(i, j)] * sq[tri_index(n - i, m - j)];
                }
            }
            let rate = p1[n] * p2[m];
            let block = solve_order_block(rate, a, cube / eps_a, n, m)?;
            if block.iter().any(|c| !c.is_finite()) {
                return Err(Error::CoefficientOverflow { order: d });
            }
            let idx = tri_index(n, m);
            coeffs[idx] = block;
            a3[idx] = block[2];
        }
    }
    Ok(coeffs)
}
