//! Arithmetic in the ring of integers modulo a small prime.

/// Trial-division primality test; enough for the single-digit and
/// low-double-digit moduli used throughout.
pub fn is_prime(d: u32) -> bool {
    if d < 2 {
        return false;
    }
    let mut k = 2u32;
    while k * k <= d {
        if d.is_multiple_of(k) {
            return false;
        }
        k += 1;
    }
    true
}

/// Reduces a possibly negative value into `{0, …, d-1}`.
pub fn reduce(value: i64, d: u32) -> u32 {
    let m = i64::from(d);
    (((value % m) + m) % m) as u32
}

pub fn add(a: u32, b: u32, d: u32) -> u32 {
    (a + b) % d
}

pub fn sub(a: u32, b: u32, d: u32) -> u32 {
    (a + d - b % d) % d
}

pub fn mul(a: u32, b: u32, d: u32) -> u32 {
    ((u64::from(a) * u64::from(b)) % u64::from(d)) as u32
}

pub fn neg(a: u32, d: u32) -> u32 {
    (d - a % d) % d
}

pub fn pow(mut base: u32, mut exp: u64, d: u32) -> u32 {
    let mut acc = 1u32;
    base %= d;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul(acc, base, d);
        }
        base = mul(base, base, d);
        exp >>= 1;
    }
    acc
}

/// Multiplicative inverse modulo a prime, via Fermat's little theorem.
///
/// Panics if `a ≡ 0`; callers guarantee a nonzero argument.
pub fn inv(a: u32, d: u32) -> u32 {
    let a = a % d;
    assert!(a != 0, "zero has no inverse mod {d}");
    pow(a, u64::from(d) - 2, d)
}
