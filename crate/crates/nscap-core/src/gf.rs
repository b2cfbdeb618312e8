//! Small finite fields via precomputed addition/multiplication tables.
//!
//! Supports the orders needed by the state-dependent channel constructions:
//! primes 2, 3, 5, 7 (modular arithmetic) and prime powers 4, 8, 9
//! (polynomial arithmetic modulo a fixed irreducible polynomial).

use crate::{Error, Result};

/// Field orders with table support.
pub const SUPPORTED_ORDERS: [usize; 7] = [2, 3, 4, 5, 7, 8, 9];

/// Addition and multiplication tables for `GF(q)`, elements `0..q-1`.
#[derive(Debug, Clone)]
pub struct GfTables {
    q: usize,
    add: Vec<u8>,
    mul: Vec<u8>,
}

impl GfTables {
    pub fn new(q: usize) -> Result<Self> {
        if !SUPPORTED_ORDERS.contains(&q) {
            return Err(Error::InvalidArgument(format!(
                "unsupported field order {q}; supported: {SUPPORTED_ORDERS:?}"
            )));
        }
        let (p, deg, modulus) = match q {
            2 => (2usize, 1usize, 0usize),
            3 => (3, 1, 0),
            5 => (5, 1, 0),
            7 => (7, 1, 0),
            // irreducible polynomials, coefficient i of x^i stored base-p
            4 => (2, 2, 0b111),   // x^2 + x + 1 over GF(2)
            8 => (2, 3, 0b1011),  // x^3 + x + 1 over GF(2)
            9 => (3, 2, 1 + 0 * 3 + 1 * 9), // x^2 + 1 over GF(3)
            _ => unreachable!(),
        };
        let mut add = vec![0u8; q * q];
        let mut mul = vec![0u8; q * q];
        for a in 0..q {
            for b in 0..q {
                add[a * q + b] = poly_add(a, b, p, deg) as u8;
                mul[a * q + b] = poly_mul(a, b, p, deg, modulus) as u8;
            }
        }
        Ok(Self { q, add, mul })
    }

    pub fn order(&self) -> usize {
        self.q
    }

    pub fn add(&self, a: usize, b: usize) -> usize {
        self.add[a * self.q + b] as usize
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.mul[a * self.q + b] as usize
    }

    pub fn neg(&self, a: usize) -> usize {
        (0..self.q).find(|&b| self.add(a, b) == 0).unwrap()
    }

    pub fn sub(&self, a: usize, b: usize) -> usize {
        self.add(a, self.neg(b))
    }
}

fn digits(mut v: usize, p: usize, deg: usize) -> Vec<usize> {
    let mut d = vec![0usize; deg];
    for item in d.iter_mut() {
        *item = v % p;
        v /= p;
    }
    d
}

fn from_digits(d: &[usize], p: usize) -> usize {
    d.iter().rev().fold(0, |acc, &c| acc * p + c)
}

fn poly_add(a: usize, b: usize, p: usize, deg: usize) -> usize {
    let da = digits(a, p, deg);
    let db = digits(b, p, deg);
    let sum: Vec<usize> = da.iter().zip(&db).map(|(x, y)| (x + y) % p).collect();
    from_digits(&sum, p)
}

fn poly_mul(a: usize, b: usize, p: usize, deg: usize, modulus: usize) -> usize {
    if deg == 1 {
        return (a * b) % p;
    }
    let da = digits(a, p, deg);
    let db = digits(b, p, deg);
    let mut prod = vec![0usize; 2 * deg - 1];
    for (i, &x) in da.iter().enumerate() {
        for (j, &y) in db.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x * y) % p;
        }
    }
    // reduce modulo the irreducible polynomial (monic of degree `deg`)
    let m = digits(modulus, p, deg + 1);
    for i in (deg..prod.len()).rev() {
        let c = prod[i];
        if c == 0 {
            continue;
        }
        prod[i] = 0;
        for k in 0..deg {
            // x^i = x^(i-deg) * x^deg = -x^(i-deg) * (m_0 + m_1 x + ...)
            let sub = (c * m[k]) % p;
            prod[i - deg + k] = (prod[i - deg + k] + p - sub) % p;
        }
    }
    from_digits(&prod[..deg], p)
}
