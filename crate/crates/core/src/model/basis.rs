//! Fixed-excitation-number sector of an `n_sites` qubit register.
//!
//! States are bitstrings with bit `j` set when site `j` is excited. The
//! sector is ordered lexicographically (equivalently, by increasing integer
//! value), and ranked with the combinatorial number system: a state with set
//! bits `p_0 < p_1 < ... < p_{k-1}` has rank `Σ_i C(p_i, i + 1)`.

use crate::error::{Error, Result};

pub const MAX_SITES: usize = 63;

/// Ordered basis of all `n_sites`-bit strings with `n_excitations` set bits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SectorBasis {
    n_sites: usize,
    n_excitations: usize,
    dimension: usize,
    /// `binom[n][r] = C(n, r)` for n <= n_sites, r <= n_excitations.
    binom: Vec<Vec<u64>>,
}

impl SectorBasis {
    pub fn new(n_sites: usize, n_excitations: usize) -> Result<Self> {
        let too_large = |reason: String| Error::BasisTooLarge {
            n_sites,
            n_excitations,
            reason,
        };
        if n_sites > MAX_SITES {
            return Err(too_large(format!("at most {MAX_SITES} sites are supported")));
        }
        if n_excitations > n_sites {
            return Err(too_large("more excitations than sites".into()));
        }
        let width = n_excitations + 1;
        let mut binom = vec![vec![0u64; width]; n_sites + 1];
        for n in 0..=n_sites {
            binom[n][0] = 1;
            for r in 1..width.min(n + 1) {
                let above = if r < n { binom[n - 1][r] } else { 0 };
                binom[n][r] = binom[n - 1][r - 1]
                    .checked_add(above)
                    .ok_or_else(|| too_large("binomial coefficient overflows u64".into()))?;
            }
        }
        let dimension = usize::try_from(binom[n_sites][n_excitations])
            .map_err(|_| too_large("dimension exceeds usize".into()))?;
        Ok(SectorBasis {
            n_sites,
            n_excitations,
            dimension,
            binom,
        })
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn n_excitations(&self) -> usize {
        self.n_excitations
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    fn choose(&self, n: usize, r: usize) -> u64 {
        if r > n {
            0
        } else {
            self.binom[n][r]
        }
    }

    /// Checks that `bits` lives in this sector.
    pub fn check(&self, bits: u64) -> Result<()> {
        let found = bits.count_ones();
        if found as usize != self.n_excitations || (self.n_sites < 64 && bits >> self.n_sites != 0) {
            return Err(Error::WrongPopcount {
                bits,
                found,
                expected: self.n_excitations,
            });
        }
        Ok(())
    }

    /// Position of `bits` in the ordered basis.
    pub fn rank(&self, bits: u64) -> Result<usize> {
        self.check(bits)?;
        Ok(self.rank_unchecked(bits))
    }

    /// Rank without the popcount check; `bits` must belong to the sector.
    #[inline]
    pub fn rank_unchecked(&self, mut bits: u64) -> usize {
        let mut rank = 0u64;
        let mut i = 0;
        while bits != 0 {
            let p = bits.trailing_zeros() as usize;
            i += 1;
            rank += self.choose(p, i);
            bits &= bits - 1;
        }
        rank as usize
    }

    /// Bitstring at position `index`.
    pub fn unrank(&self, index: usize) -> Result<u64> {
        if index >= self.dimension {
            return Err(Error::IndexOutOfRange {
                index,
                dimension: self.dimension,
            });
        }
        let mut rem = index as u64;
        let mut bits = 0u64;
        let mut p = self.n_sites;
        for i in (1..=self.n_excitations).rev() {
            // largest p with C(p, i) <= rem
            p -= 1;
            while self.choose(p, i) > rem {
                p -= 1;
            }
            rem -= self.choose(p, i);
            bits |= 1 << p;
        }
        Ok(bits)
    }

    /// All sector states in basis order.
    /// Parses a bitstring of exactly `n_sites` characters (highest site
    /// first) and checks its excitation number.
    pub fn parse_state(&self, s: &str) -> Result<u64> {
        if s.trim().len() != self.n_sites {
            return Err(Error::InvalidArgument(format!(
                "bitstring '{}' has {} characters, expected {}",
                s.trim(),
                s.trim().len(),
                self.n_sites
            )));
        }
        let bits = parse_bits(s)?;
        self.check(bits)?;
        Ok(bits)
    }

    pub fn states(&self) -> SectorStates {
        let first = if self.n_excitations == 0 {
            0
        } else {
            (1u64 << self.n_excitations) - 1
        };
        SectorStates {
            next: Some(first),
            remaining: self.dimension,
        }
    }
}

/// Iterator over a sector in increasing order (Gosper's hack).
#[derive(Debug, Clone)]
pub struct SectorStates {
    next: Option<u64>,
    remaining: usize,
}

impl Iterator for SectorStates {
    type Item = u64;

    fn next(&mut self) -> Option<u64> {
        if self.remaining == 0 {
            return None;
        }
        let cur = self.next?;
        self.remaining -= 1;
        self.next = if cur == 0 || self.remaining == 0 {
            None
        } else {
            let c = cur & cur.wrapping_neg();
            let r = cur + c;
            Some((((r ^ cur) >> 2) / c) | r)
        };
        Some(cur)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        (self.remaining, Some(self.remaining))
    }
}

impl ExactSizeIterator for SectorStates {}

/// Renders a bitstring with site `n_sites - 1` leftmost, as in `0011` for
/// sites 0 and 1 excited.
pub fn format_bits(bits: u64, n_sites: usize) -> String {
    (0..n_sites)
        .rev()
        .map(|j| if bits >> j & 1 == 1 { '1' } else { '0' })
        .collect()
}

/// Inverse of [`format_bits`].
pub fn parse_bits(s: &str) -> Result<u64> {
    let s = s.trim();
    if s.is_empty() || s.len() > 64 {
        return Err(Error::InvalidArgument(format!("bad bitstring '{s}'")));
    }
    let mut bits = 0u64;
    for c in s.chars() {
        bits <<= 1;
        match c {
            '1' => bits |= 1,
            '0' => {}
            _ => return Err(Error::InvalidArgument(format!("bad bitstring '{s}'"))),
        }
    }
    Ok(bits)
}

/// Site-occupation bits as a 0/1 vector indexed by site.
pub fn occupations(bits: u64, n_sites: usize) -> Vec<f64> {
    (0..n_sites).map(|j| (bits >> j & 1) as f64).collect()
}
