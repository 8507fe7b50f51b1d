use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Beam index chosen for every (AP, user) pair, stored AP-major.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BeamAssignment {
    aps: usize,
    users: usize,
    idx: Vec<usize>,
}

impl BeamAssignment {
    pub fn filled(aps: usize, users: usize, beam: usize) -> Self {
        Self { aps, users, idx: vec![beam; aps * users] }
    }

    /// Builds from AP-major indices (`idx[l * K + k]`).
    pub fn from_indices(aps: usize, users: usize, idx: Vec<usize>) -> Result<Self> {
        if idx.len() != aps * users {
            return Err(Error::InvalidAssignment(format!(
                "expected {} indices for L={aps}, K={users}, got {}",
                aps * users,
                idx.len()
            )));
        }
        Ok(Self { aps, users, idx })
    }

    /// Every AP uses the same per-user beams.
    pub fn repeated(aps: usize, per_user: &[usize]) -> Self {
        let users = per_user.len();
        let idx = (0..aps).flat_map(|_| per_user.iter().copied()).collect();
        Self { aps, users, idx }
    }

    pub fn aps(&self) -> usize {
        self.aps
    }

    pub fn users(&self) -> usize {
        self.users
    }

    pub fn get(&self, ap: usize, user: usize) -> usize {
        self.idx[ap * self.users + user]
    }

    pub fn set(&mut self, ap: usize, user: usize, beam: usize) {
        self.idx[ap * self.users + user] = beam;
    }

    /// Beams of AP `ap`, indexed by user.
    pub fn ap_beams(&self, ap: usize) -> &[usize] {
        &self.idx[ap * self.users..(ap + 1) * self.users]
    }

    pub fn set_ap_beams(&mut self, ap: usize, beams: &[usize]) {
        self.idx[ap * self.users..(ap + 1) * self.users].copy_from_slice(beams);
    }

    pub fn indices(&self) -> &[usize] {
        &self.idx
    }

    pub fn validate(&self, codebook_size: usize) -> Result<()> {
        if let Some(pos) = self.idx.iter().position(|&b| b >= codebook_size) {
            return Err(Error::InvalidAssignment(format!(
                "beam {} at (l={}, k={}) is outside [0, {codebook_size})",
                self.idx[pos],
                pos / self.users,
                pos % self.users
            )));
        }
        Ok(())
    }

    /// Number of unordered pairs of (AP, user) entries that hand the same beam
    /// to two different users. Only pairs active in `mask` count.
    pub fn conflicts(&self, mask: Option<&ActiveMask>) -> usize {
        let on = |l: usize, k: usize| mask.is_none_or(|m| m.is_active(l, k));
        let mut count = 0;
        for a in 0..self.idx.len() {
            let (la, ka) = (a / self.users, a % self.users);
            if !on(la, ka) {
                continue;
            }
            for b in a + 1..self.idx.len() {
                let (lb, kb) = (b / self.users, b % self.users);
                if ka != kb && on(lb, kb) && self.idx[a] == self.idx[b] {
                    count += 1;
                }
            }
        }
        count
    }

    pub fn is_conflict_free(&self, mask: Option<&ActiveMask>) -> bool {
        self.conflicts(mask) == 0
    }
}

impl fmt::Display for BeamAssignment {
    /// APs separated by `|`, users by spaces.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in 0..self.aps {
            if l > 0 {
                f.write_str("|")?;
            }
            for (k, b) in self.ap_beams(l).iter().enumerate() {
                if k > 0 {
                    f.write_str(" ")?;
                }
                write!(f, "{b}")?;
            }
        }
        Ok(())
    }
}

/// Which users each AP serves (one RF chain per served user).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActiveMask {
    aps: usize,
    users: usize,
    active: Vec<bool>,
}

impl ActiveMask {
    pub fn all(aps: usize, users: usize) -> Self {
        Self { aps, users, active: vec![true; aps * users] }
    }

    /// `served[l]` lists the users AP `l` serves.
    pub fn from_served(users: usize, served: &[Vec<usize>]) -> Self {
        let aps = served.len();
        let mut active = vec![false; aps * users];
        for (l, set) in served.iter().enumerate() {
            for &k in set {
                active[l * users + k] = true;
            }
        }
        Self { aps, users, active }
    }

    pub fn aps(&self) -> usize {
        self.aps
    }

    pub fn users(&self) -> usize {
        self.users
    }

    pub fn is_active(&self, ap: usize, user: usize) -> bool {
        self.active[ap * self.users + user]
    }

    pub fn served(&self, ap: usize) -> Vec<usize> {
        (0..self.users).filter(|&k| self.is_active(ap, k)).collect()
    }

    pub fn active_count(&self) -> usize {
        self.active.iter().filter(|&&a| a).count()
    }

    /// Fraction of the `K * L` RF chains that are switched off.
    pub fn saving_fraction(&self) -> f64 {
        1.0 - self.active_count() as f64 / self.active.len() as f64
    }
}
