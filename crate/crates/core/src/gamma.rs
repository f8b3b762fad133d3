//! Congruence subgroups: membership, seeded sampling, the invariant
//! sublattices of `Γ(N)` and `Γ₀(N)`, and a stock weight-2 form on `Γ₀(N)`.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::correspondence::{FormDescriptor, FormEval};
use crate::eisenstein;
use crate::lattice::{Extended, Lattice, ModularPoint, Unimodular, C64};
use crate::weierstrass::EvalConfig;

/// Largest absolute entry a sampled matrix may have.
pub const ENTRY_CAP: i64 = 1_000_000;

/// Maximum word length used when sampling the full modular group.
pub const MAX_WORD_LENGTH: usize = 12;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GroupError {
    #[error("cannot parse group spec {0:?}; expected SL2Z, Gamma0(N), Gamma1(N) or Gamma(N)")]
    Parse(String),
    #[error("level must be at least 1")]
    Level,
    #[error("no sublattice rule for {0}")]
    Unsupported(CongruenceGroup),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GroupKind {
    Full,
    Gamma0,
    Gamma1,
    Principal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CongruenceGroup {
    kind: GroupKind,
    level: u64,
}

impl CongruenceGroup {
    pub const FULL: CongruenceGroup = CongruenceGroup {
        kind: GroupKind::Full,
        level: 1,
    };

    pub fn new(kind: GroupKind, level: u64) -> Result<Self, GroupError> {
        if level == 0 {
            return Err(GroupError::Level);
        }
        let level = if kind == GroupKind::Full { 1 } else { level };
        Ok(CongruenceGroup { kind, level })
    }

    pub fn gamma0(level: u64) -> Result<Self, GroupError> {
        Self::new(GroupKind::Gamma0, level)
    }

    pub fn gamma1(level: u64) -> Result<Self, GroupError> {
        Self::new(GroupKind::Gamma1, level)
    }

    pub fn principal(level: u64) -> Result<Self, GroupError> {
        Self::new(GroupKind::Principal, level)
    }

    pub fn kind(&self) -> GroupKind {
        self.kind
    }

    pub fn level(&self) -> u64 {
        self.level
    }

    pub fn contains(&self, gamma: &Unimodular) -> bool {
        let n = BigInt::from(self.level);
        let divides = |x: &BigInt| x.mod_floor(&n).is_zero();
        let one = BigInt::from(1);
        match self.kind {
            GroupKind::Full => true,
            GroupKind::Gamma0 => divides(gamma.c()),
            GroupKind::Gamma1 => {
                divides(gamma.c()) && divides(&(gamma.a() - &one)) && divides(&(gamma.d() - &one))
            }
            GroupKind::Principal => gamma.is_congruent_to_identity(&n),
        }
    }

    /// Deterministic pseudo-random elements of the group.
    ///
    /// The full group is sampled as words of length `1..=12` in `T^{±1}`,
    /// `S^{±1}`. Congruence subgroups draw `c = N·c′`, an `a` with the required
    /// residue and coprime to `c`, and complete `(b, d)` from the extended
    /// Euclidean identity, shifting along `(b, d) ↦ (b + ka, d + kc)` to fix
    /// residues and keep entries small.
    pub fn sample_elements(&self, count: usize, seed: u64) -> Vec<Unimodular> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..count)
            .map(|_| {
                let g = match self.kind {
                    GroupKind::Full => random_word(&mut rng),
                    _ => self.random_congruence_element(&mut rng),
                };
                debug_assert!(self.contains(&g), "{g} not in {self}");
                debug_assert!(g.max_entry() <= BigInt::from(ENTRY_CAP));
                g
            })
            .collect()
    }

    fn random_congruence_element(&self, rng: &mut ChaCha8Rng) -> Unimodular {
        let n = self.level as i64;
        // a ≡ 1 (mod N) for Γ₁ and Γ; any unit otherwise
        let residue_one = matches!(self.kind, GroupKind::Gamma1 | GroupKind::Principal);
        loop {
            let c = n * rng.gen_range(-3..=3i64);
            if c == 0 {
                // −1 ≡ 1 only when N ≤ 2
                let a: i64 = if (residue_one && n > 2) || rng.gen_bool(0.5) { 1 } else { -1 };
                let b = match self.kind {
                    GroupKind::Principal => n * rng.gen_range(-3..=3i64),
                    _ => rng.gen_range(-6..=6i64),
                };
                return Unimodular::new(a, b * a, 0, a).expect("det 1");
            }
            let a = if residue_one {
                1 + n * rng.gen_range(-3..=3i64)
            } else {
                rng.gen_range(-12..=12i64)
            };
            if a == 0 || a.gcd(&c) != 1 {
                continue;
            }
            // a·x + c·y = 1
            let e = a.extended_gcd(&c);
            let (x, y) = (e.x * e.gcd, e.y * e.gcd);
            let (d0, b0) = (x, -y);
            // bring d into a short window, then optionally shift once more
            let mut k = -Integer::div_floor(&d0, &c);
            if self.kind == GroupKind::Principal {
                // b0 + k·a ≡ 0 (mod N), and a ≡ 1
                k = (-b0).mod_floor(&n) + n * Integer::div_floor(&k, &n);
            } else {
                k += rng.gen_range(-1..=1i64);
            }
            let (b, d) = (b0 + k * a, d0 + k * c);
            let g = Unimodular::new(a, b, c, d).expect("det 1");
            if self.contains(&g) && g.max_entry() <= BigInt::from(ENTRY_CAP) {
                return g;
            }
        }
    }
}

fn random_word(rng: &mut ChaCha8Rng) -> Unimodular {
    let len = rng.gen_range(1..=MAX_WORD_LENGTH);
    let mut g = Unimodular::identity();
    for _ in 0..len {
        let step = match rng.gen_range(0..4) {
            0 => Unimodular::t(),
            1 => Unimodular::t().inverse(),
            2 => Unimodular::s(),
            _ => Unimodular::s().inverse(),
        };
        g = &g * &step;
    }
    g
}

impl fmt::Display for CongruenceGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            GroupKind::Full => f.write_str("SL2Z"),
            GroupKind::Gamma0 => write!(f, "Gamma0({})", self.level),
            GroupKind::Gamma1 => write!(f, "Gamma1({})", self.level),
            GroupKind::Principal => write!(f, "Gamma({})", self.level),
        }
    }
}

impl FromStr for CongruenceGroup {
    type Err = GroupError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s == "SL2Z" {
            return Ok(CongruenceGroup::FULL);
        }
        let err = || GroupError::Parse(s.to_string());
        let open = s.find('(').ok_or_else(err)?;
        let inner = s[open + 1..].strip_suffix(')').ok_or_else(err)?;
        let level: u64 = inner.trim().parse().map_err(|_| err())?;
        let kind = match &s[..open] {
            "Gamma0" => GroupKind::Gamma0,
            "Gamma1" => GroupKind::Gamma1,
            "Gamma" => GroupKind::Principal,
            _ => return Err(err()),
        };
        CongruenceGroup::new(kind, level)
    }
}

/// The `Γ`-invariant sublattice `Λ′ ⊂ Λ` attached to `Γ`.
///
/// Invariance is with respect to `γ` acting on coordinate vectors
/// `(x, y) ↦ γ(x, y)ᵗ` of `xω₁ + yω₂`.
#[derive(Debug, Clone, PartialEq)]
pub struct SublatticeDescriptor {
    pub group: CongruenceGroup,
    pub index: u64,
    pub basis: (C64, C64),
    pub rule: &'static str,
}

impl SublatticeDescriptor {
    /// Whether `xω₁ + yω₂` (given by integer coordinates) lies in `Λ′`.
    pub fn contains_coordinates(&self, x: i64, y: i64) -> bool {
        let n = self.group.level as i64;
        match self.group.kind {
            GroupKind::Full => true,
            GroupKind::Principal => x % n == 0 && y % n == 0,
            GroupKind::Gamma0 => y % n == 0,
            GroupKind::Gamma1 => false,
        }
    }
}

pub fn sublattice_of(
    group: CongruenceGroup,
    lattice: &Lattice,
) -> Result<SublatticeDescriptor, GroupError> {
    let (w1, w2) = (lattice.omega1(), lattice.omega2());
    let n = group.level;
    let nf = n as f64;
    match group.kind {
        GroupKind::Full => Ok(SublatticeDescriptor {
            group,
            index: 1,
            basis: (w1, w2),
            rule: "w1 Z + w2 Z",
        }),
        GroupKind::Principal => Ok(SublatticeDescriptor {
            group,
            index: n * n,
            basis: (w1 * nf, w2 * nf),
            rule: "N w1 Z + N w2 Z",
        }),
        GroupKind::Gamma0 => Ok(SublatticeDescriptor {
            group,
            index: n,
            basis: (w1, w2 * nf),
            rule: "w1 Z + N w2 Z",
        }),
        GroupKind::Gamma1 => Err(GroupError::Unsupported(group)),
    }
}

/// `E₂(τ) − N·E₂(Nτ)`, a holomorphic weight-2 form on `Γ₀(N)`.
pub fn stock_weight2_form(level: u64, cfg: EvalConfig) -> FormDescriptor {
    assert!(level >= 2, "stock form needs N >= 2");
    let n = level as f64;
    let eval: FormEval = Arc::new(move |tau: ModularPoint| {
        let scaled = ModularPoint::new(tau.tau() * n).expect("Nτ in upper half-plane");
        Extended::Finite(eisenstein::e2(tau, cfg.qseries) - eisenstein::e2(scaled, cfg.qseries) * n)
    });
    let deriv: FormEval = Arc::new(move |tau: ModularPoint| {
        let scaled = ModularPoint::new(tau.tau() * n).expect("Nτ in upper half-plane");
        Extended::Finite(
            eisenstein::e2_prime(tau, cfg.qseries) - eisenstein::e2_prime(scaled, cfg.qseries) * (n * n),
        )
    });
    FormDescriptor::new(
        format!("gamma0_stock:{level}"),
        2,
        CongruenceGroup::gamma0(level).expect("level >= 2"),
        eval,
        Some(deriv),
    )
}

/// True when the absolute entries of `gamma` stay within [`ENTRY_CAP`].
pub fn within_cap(gamma: &Unimodular) -> bool {
    gamma.max_entry().abs() <= BigInt::from(ENTRY_CAP)
}
