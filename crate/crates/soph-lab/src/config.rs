//! The full run configuration. A run is reproducible from its config
//! alone; the canonical string (and its hash) is embedded in every output
//! file so artifacts from different configs cannot be mixed silently.

use sha2::{Digest, Sha256};

use crate::bits::BitString;
use crate::enumerate::EnumConfig;
use crate::machine::MACHINE_ID;
use crate::soph::SophParams;
use crate::tables::OmegaCutoff;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ModeSelection {
    Qp,
    Qk,
    #[default]
    Both,
}

impl ModeSelection {
    pub fn label(self) -> &'static str {
        match self {
            ModeSelection::Qp => "qp",
            ModeSelection::Qk => "qk",
            ModeSelection::Both => "both",
        }
    }

    pub fn modes(self) -> &'static [crate::tables::Mode] {
        use crate::tables::Mode;
        match self {
            ModeSelection::Qp => &[Mode::Qp],
            ModeSelection::Qk => &[Mode::Qk],
            ModeSelection::Both => &[Mode::Qp, Mode::Qk],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunConfig {
    pub l_max: u32,
    pub t_max: u64,
    pub output_cap: u32,
    pub aux: BitString,
    pub c_max: u32,
    pub c_p: i64,
    pub modes: ModeSelection,
    pub cutoff: OmegaCutoff,
    pub workers: usize,
    /// Sample size for checks that need per-condition enumerations.
    pub cond_sample: usize,
    /// Conditional enumerations run at l_max minus this reduction.
    pub cond_l_max_delta: u32,
}

impl RunConfig {
    pub fn new(l_max: u32, t_max: u64) -> Self {
        RunConfig {
            l_max,
            t_max,
            output_cap: 64,
            aux: BitString::new(),
            c_max: 8,
            c_p: 0,
            modes: ModeSelection::Both,
            cutoff: OmegaCutoff::AllOutputs,
            workers: 1,
            cond_sample: 24,
            cond_l_max_delta: 4,
        }
    }

    pub fn enum_config(&self) -> EnumConfig {
        EnumConfig::new(self.l_max, self.t_max, self.output_cap, self.aux.clone())
    }

    /// Enumeration config for a conditional run with the given aux.
    pub fn cond_enum_config(&self, aux: BitString) -> EnumConfig {
        let l = self.l_max.saturating_sub(self.cond_l_max_delta).max(1);
        EnumConfig::new(l, self.t_max, self.output_cap, aux)
    }

    pub fn soph_params(&self) -> SophParams {
        SophParams { c_max: self.c_max, c_p: self.c_p }
    }

    /// Key-value pairs in canonical order; workers are excluded because
    /// they cannot affect any result.
    pub fn canonical_pairs(&self) -> Vec<(String, String)> {
        vec![
            ("machine".into(), MACHINE_ID.into()),
            ("lmax".into(), self.l_max.to_string()),
            ("tmax".into(), self.t_max.to_string()),
            ("ocap".into(), self.output_cap.to_string()),
            ("aux".into(), self.aux.to_string()),
            ("cmax".into(), self.c_max.to_string()),
            ("cp".into(), self.c_p.to_string()),
            ("modes".into(), self.modes.label().into()),
            ("cutoff".into(), self.cutoff.label().into()),
            ("cond_sample".into(), self.cond_sample.to_string()),
            ("cond_lmax_delta".into(), self.cond_l_max_delta.to_string()),
        ]
    }

    pub fn canonical_string(&self) -> String {
        self.canonical_pairs()
            .into_iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect::<Vec<_>>()
            .join("; ")
    }

    /// Short hex hash of the canonical string.
    pub fn hash_hex(&self) -> String {
        let digest = Sha256::digest(self.canonical_string().as_bytes());
        digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hash_ignores_workers_but_not_params() {
        let mut a = RunConfig::new(10, 256);
        let mut b = RunConfig::new(10, 256);
        a.workers = 1;
        b.workers = 8;
        assert_eq!(a.hash_hex(), b.hash_hex());
        b.t_max = 257;
        assert_ne!(a.hash_hex(), b.hash_hex());
    }

    #[test]
    fn canonical_string_is_stable() {
        let cfg = RunConfig::new(6, 256);
        assert_eq!(
            cfg.canonical_string(),
            "machine=RM1-v1; lmax=6; tmax=256; ocap=64; aux=e; cmax=8; cp=0; \
             modes=both; cutoff=none; cond_sample=24; cond_lmax_delta=4"
        );
    }
}
