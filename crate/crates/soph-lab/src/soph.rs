//! Sophistication quantities over the derived tables: slack-parameterized
//! m-sophistication k_c, the mass-ratio variant k', the induced sumtest
//! exponent, coarse m-sophistication, the per-level statistics P_k with
//! exact normalization, and their Shannon-Fano companion codes.
//!
//! Every "2 log k" term is realized as `2 * ceil(log2(k+1))`, keeping all
//! exponents integral so the sumtest sums stay exactly dyadic. The
//! statistics are normalized exactly by Z_k; probabilities are the exact
//! rationals delta/Z_k, carried as (dyadic, dyadic) pairs rather than
//! floats.

use std::collections::BTreeMap;

use num_bigint::BigUint;

use crate::bits::BitString;
use crate::dyadic::Dyadic;
use crate::error::SophError;
use crate::tables::{Mode, Tables, TimeBound};

/// `ceil(log2(m))` for `m >= 1`.
pub fn ceil_log2(m: u64) -> u32 {
    assert!(m >= 1);
    if m == 1 {
        0
    } else {
        64 - (m - 1).leading_zeros()
    }
}

/// The `2 log k` penalty used throughout: `2 * ceil(log2(k + 1))`.
pub fn log_penalty(k: u32) -> i64 {
    2 * ceil_log2(k as u64 + 1) as i64
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SophParams {
    /// Largest slack c for which k_c is tabulated.
    pub c_max: u32,
    /// Additive constant in the statistic description-length surrogate.
    pub c_p: i64,
}

impl Default for SophParams {
    fn default() -> Self {
        SophParams { c_max: 8, c_p: 0 }
    }
}

/// m-sophistication: least k such that x compresses to within c of K(x)
/// by time t_k. Always at least 1 (t_0 = 0 admits no witness) and at most
/// n_sat + 1 (t saturates at the convergence time).
pub fn m_soph(tables: &Tables, mode: Mode, x: &BitString, c: u32) -> Result<u32, SophError> {
    let k_final = tables
        .k_of(x, TimeBound::Unbounded)
        .ok_or_else(|| SophError::UnknownK { x: x.to_string() })?;
    let omega = tables.omega(mode);
    for k in 0..=omega.n_sat + 1 {
        if let Some(kt) = tables.k_of(x, TimeBound::At(omega.t_n(k))) {
            if kt <= k_final + c {
                return Ok(k);
            }
        }
    }
    unreachable!("K_t reaches K at the convergence time");
}

/// Least k with any witness for x by t_k; the floor of k_c as c grows.
pub fn floor_k(tables: &Tables, mode: Mode, x: &BitString) -> Result<u32, SophError> {
    if tables.k_of(x, TimeBound::Unbounded).is_none() {
        return Err(SophError::UnknownK { x: x.to_string() });
    }
    let omega = tables.omega(mode);
    for k in 0..=omega.n_sat + 1 {
        if tables.k_of(x, TimeBound::At(omega.t_n(k))).is_some() {
            return Ok(k);
        }
    }
    unreachable!("a witness exists at the convergence time");
}

/// (m,m)-sophistication: least k with m(x) <= 2 m_{t_k}(x), compared
/// exactly in dyadics.
pub fn mm_soph(tables: &Tables, mode: Mode, x: &BitString) -> Result<u32, SophError> {
    let mass = tables.m_of(x, TimeBound::Unbounded, mode);
    if mass.is_zero() {
        return Err(SophError::ZeroMass { x: x.to_string() });
    }
    let omega = tables.omega(mode);
    for k in 0..=omega.n_sat + 1 {
        let at_k = tables.m_of(x, TimeBound::At(omega.t_n(k)), mode);
        if mass <= at_k.mul_pow2(1) {
            return Ok(k);
        }
    }
    unreachable!("m_t reaches m at the convergence time");
}

/// Sumtest exponent d(x) = k' - 2 ceil(log2(k' + 1)).
pub fn sumtest_d(k_prime: u32) -> i64 {
    k_prime as i64 - log_penalty(k_prime)
}

/// Per-string sophistication summary.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SophRecord {
    pub x: BitString,
    /// Restricted K(x).
    pub k_value: u32,
    /// k_c for c = 0..=c_max; nonincreasing in c.
    pub k_c: Vec<u32>,
    /// Least k with any witness by t_k.
    pub floor_k: u32,
    /// Whether k_c reached its floor within c_max; the bounded coarse
    /// minimum below is exact exactly when this holds.
    pub floor_reached: bool,
    pub k_prime: u32,
    pub sumtest_d: i64,
    /// min over c <= c_max of k_c + c.
    pub coarse: u32,
}

#[derive(Debug, Clone)]
pub struct SophTable {
    pub mode: Mode,
    pub params: SophParams,
    records: BTreeMap<BitString, SophRecord>,
}

impl SophTable {
    pub fn build(tables: &Tables, mode: Mode, params: SophParams) -> SophTable {
        let mut records = BTreeMap::new();
        for (x, row) in tables.k_table.iter() {
            let k_c: Vec<u32> = (0..=params.c_max)
                .map(|c| m_soph(tables, mode, x, c).expect("witness exists"))
                .collect();
            let floor = floor_k(tables, mode, x).expect("witness exists");
            let k_prime = mm_soph(tables, mode, x).expect("mass is positive");
            let coarse = k_c
                .iter()
                .enumerate()
                .map(|(c, &k)| k + c as u32)
                .min()
                .expect("c_max >= 0");
            records.insert(
                x.clone(),
                SophRecord {
                    x: x.clone(),
                    k_value: row.k_value,
                    floor_reached: *k_c.last().expect("nonempty") == floor,
                    k_c,
                    floor_k: floor,
                    k_prime,
                    sumtest_d: sumtest_d(k_prime),
                    coarse,
                },
            );
        }
        SophTable { mode, params, records }
    }

    pub fn record(&self, x: &BitString) -> Option<&SophRecord> {
        self.records.get(x)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&BitString, &SophRecord)> {
        self.records.iter()
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Exact sumtest sum over the whole restricted support:
    /// sum of m(x) 2^{d(x)}.
    pub fn sumtest_sum(&self, tables: &Tables) -> Dyadic {
        let mut acc = Dyadic::zero();
        for (x, rec) in &self.records {
            let mass = tables.m_of(x, TimeBound::Unbounded, self.mode);
            acc = acc.add(&mass.mul_pow2(rec.sumtest_d));
        }
        acc
    }

    /// m(S_k) where S_k = {x : k'(x) >= k}.
    pub fn mass_of_deep_set(&self, tables: &Tables, k: u32) -> Dyadic {
        let mut acc = Dyadic::zero();
        for (x, rec) in &self.records {
            if rec.k_prime >= k {
                acc = acc.add(&tables.m_of(x, TimeBound::Unbounded, self.mode));
            }
        }
        acc
    }

    /// m_t(S_k) at an arbitrary bound, same set as [`mass_of_deep_set`].
    pub fn bounded_mass_of_deep_set(&self, tables: &Tables, k: u32, bound: TimeBound) -> Dyadic {
        let mut acc = Dyadic::zero();
        for (x, rec) in &self.records {
            if rec.k_prime >= k {
                acc = acc.add(&tables.m_of(x, bound, self.mode));
            }
        }
        acc
    }
}

/// The level-k statistic: exact masses delta_k(x) = m_{t_k}(x) -
/// m_{t_{k-1}}(x) over its support, with the normalizer Z_k taken
/// independently from the trace, so that the normalization identity
/// sum(delta) = Z_k is a checkable equation rather than a tautology.
/// P_k(x) is the exact rational delta(x) / Z_k.
#[derive(Debug, Clone)]
pub struct Statistic {
    pub k: u32,
    pub mode: Mode,
    entries: Vec<(BitString, Dyadic)>,
    /// Z_k = Omega_{t_k} - Omega_{t_{k-1}}, from the omega trace.
    pub z: Dyadic,
    /// Description-length surrogate: k + 2 ceil(log2(k+1)) + c_p.
    pub k_upper_bound: i64,
}

impl Statistic {
    pub fn entries(&self) -> &[(BitString, Dyadic)] {
        &self.entries
    }

    pub fn delta(&self, x: &BitString) -> Option<&Dyadic> {
        self.entries
            .binary_search_by(|(e, _)| e.cmp(x))
            .ok()
            .map(|i| &self.entries[i].1)
    }

    pub fn support_len(&self) -> usize {
        self.entries.len()
    }

    /// Sum of the support masses; equals `z` exactly.
    pub fn mass_sum(&self) -> Dyadic {
        Dyadic::sum(self.entries.iter().map(|(_, d)| d).collect::<Vec<_>>())
    }

    /// The implied scaling constant N = 2^k / Z_k, as the exact fraction
    /// 2^pow2 / denom with odd denom.
    pub fn implied_n(&self) -> (u64, BigUint) {
        (self.k as u64 + self.z.exponent(), self.z.numerator().clone())
    }

    /// ceil(-log2 P_k(x)): least L with delta(x) * 2^L >= Z_k.
    pub fn neg_log2_prob_ceil(&self, x: &BitString) -> Option<u64> {
        let delta = self.delta(x)?;
        let lhs = delta.numerator() << self.z.exponent();
        let rhs = self.z.numerator() << delta.exponent();
        if lhs >= rhs {
            return Some(0);
        }
        let mut l = rhs.bits() - lhs.bits();
        if (&lhs << l) < rhs {
            l += 1;
        }
        Some(l)
    }
}

/// Build P_k. Defined for 1 <= k <= n_sat + 1 (the level past n_sat
/// captures the final mass arrival and closes P_{k'} for every x).
pub fn statistic_pk(
    tables: &Tables,
    mode: Mode,
    k: u32,
    c_p: i64,
) -> Result<Statistic, SophError> {
    let omega = tables.omega(mode);
    let max = omega.n_sat + 1;
    if k < 1 || k > max {
        return Err(SophError::StatisticRange { k, max });
    }
    let t_hi = omega.t_n(k);
    let t_lo = omega.t_n(k - 1);
    let z = omega
        .omega_at(t_hi)
        .checked_sub(&omega.omega_at(t_lo))
        .expect("omega is nondecreasing");
    if z.is_zero() {
        return Err(SophError::EmptyStatistic { k });
    }
    let mut entries = Vec::new();
    for (x, _) in tables.k_table.iter() {
        let hi = tables.m_of(x, TimeBound::At(t_hi), mode);
        let lo = tables.m_of(x, TimeBound::At(t_lo), mode);
        let delta = hi.checked_sub(&lo).expect("m_t is nondecreasing");
        if !delta.is_zero() {
            entries.push((x.clone(), delta));
        }
    }
    Ok(Statistic { k, mode, entries, z, k_upper_bound: k as i64 + log_penalty(k) + c_p })
}

/// Sufficiency gap of x against a statistic:
/// k_upper_bound + ceil(-log2 P(x)) - K(x); `None` when x is outside the
/// support.
pub fn sufficiency_gap(tables: &Tables, statistic: &Statistic, x: &BitString) -> Option<i64> {
    let l = statistic.neg_log2_prob_ceil(x)?;
    let k = tables.k_of(x, TimeBound::Unbounded)?;
    Some(statistic.k_upper_bound + l as i64 - k as i64)
}

/// A canonical prefix code with codeword lengths ceil(-log2 P(x)) + 1.
#[derive(Debug, Clone)]
pub struct PrefixCode {
    codewords: BTreeMap<BitString, BitString>,
}

impl PrefixCode {
    pub fn codeword(&self, x: &BitString) -> Option<&BitString> {
        self.codewords.get(x)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&BitString, &BitString)> {
        self.codewords.iter()
    }

    pub fn len(&self) -> usize {
        self.codewords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.codewords.is_empty()
    }

    pub fn kraft_sum(&self) -> Dyadic {
        Dyadic::sum(
            self.codewords
                .values()
                .map(|w| Dyadic::pow2_neg(w.len() as u64))
                .collect::<Vec<_>>()
                .iter(),
        )
    }
}

/// Shannon-Fano companion code of a statistic: lengths
/// ceil(-log2 P(x)) + 1, canonical assignment sorted by (length, x).
pub fn shannon_fano(statistic: &Statistic) -> PrefixCode {
    let mut lengths: Vec<(u64, BitString)> = statistic
        .entries()
        .iter()
        .map(|(x, _)| {
            let l = statistic.neg_log2_prob_ceil(x).expect("x in support") + 1;
            (l, x.clone())
        })
        .collect();
    lengths.sort();

    let mut codewords = BTreeMap::new();
    let mut code: u128 = 0;
    let mut prev_len: u64 = 0;
    for (len, x) in lengths {
        assert!(len <= 127, "codeword length out of range");
        if prev_len > 0 {
            code = (code + 1) << (len - prev_len);
        }
        // Kraft <= 1/2 guarantees the counter never overflows the width.
        assert!(len == 0 || code < (1u128 << len), "canonical code overflow");
        let mut bits = BitString::new();
        for i in (0..len).rev() {
            bits.push(((code >> i) & 1) as u8);
        }
        codewords.insert(x, bits);
        prev_len = len;
    }
    PrefixCode { codewords }
}

/// The constructive map from a finite prefix-free function to a
/// probability table: P(x) = sum of 2^{-l(d)} over d with g(d) = x and
/// index_of(d) <= index_of(x). Outputs with zero mass are absent.
pub fn function_to_prob(
    g: &BTreeMap<BitString, BitString>,
) -> Result<BTreeMap<BitString, Dyadic>, SophError> {
    let keys: Vec<&BitString> = g.keys().collect();
    for (i, a) in keys.iter().enumerate() {
        for b in keys.iter().skip(i + 1) {
            if a.is_prefix_of(b) || b.is_prefix_of(a) {
                return Err(SophError::NonPrefixFreeDomain {
                    a: a.to_string(),
                    b: b.to_string(),
                });
            }
        }
    }
    let mut table: BTreeMap<BitString, Dyadic> = BTreeMap::new();
    for (d, x) in g {
        // Length-lex order is exactly the index order.
        if d <= x {
            let slot = table.entry(x.clone()).or_insert_with(Dyadic::zero);
            *slot = slot.add(&Dyadic::pow2_neg(d.len() as u64));
        }
    }
    Ok(table)
}
