use std::env;

use crate::error::{Error, Result};

/// Size limits for exhaustive enumerations and dense constructions.
///
/// Defaults can be overridden through `QTFOCK_MAX_PAIRING_N`, `QTFOCK_MAX_PERM_N` and
/// `QTFOCK_MAX_DIM` when built with [`Guards::from_env`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Guards {
    /// Largest `n` for which the `(2n-1)!!` pairings of `[2n]` are enumerated.
    pub max_pairing_n: usize,
    /// Largest `n` for which the `n!` permutations are enumerated.
    pub max_perm_n: usize,
    /// Largest dimension of a dense matrix (basis size of a truncation or a Gram level).
    pub max_dim: usize,
}

impl Default for Guards {
    fn default() -> Self {
        Self {
            max_pairing_n: 10,
            max_perm_n: 8,
            max_dim: 4096,
        }
    }
}

impl Guards {
    pub fn from_env() -> Self {
        let mut g = Self::default();
        let read = |key: &str| env::var(key).ok().and_then(|v| v.trim().parse::<usize>().ok());
        if let Some(v) = read("QTFOCK_MAX_PAIRING_N") {
            g.max_pairing_n = v;
        }
        if let Some(v) = read("QTFOCK_MAX_PERM_N") {
            g.max_perm_n = v;
        }
        if let Some(v) = read("QTFOCK_MAX_DIM") {
            g.max_dim = v;
        }
        g
    }

    pub fn check_pairings(&self, n: usize) -> Result<()> {
        check("pair partitions of [2n]", n, self.max_pairing_n)
    }

    pub fn check_perms(&self, n: usize) -> Result<()> {
        check("permutations of [n]", n, self.max_perm_n)
    }

    pub fn check_dim(&self, dim: usize) -> Result<()> {
        check("dense matrix dimension", dim, self.max_dim)
    }
}

fn check(what: &'static str, requested: usize, limit: usize) -> Result<()> {
    if requested > limit {
        Err(Error::Resource {
            what,
            requested,
            limit,
        })
    } else {
        Ok(())
    }
}
