//! The lab bundles a domain with every derived table and caches the
//! per-condition enumerations that the verification suite asks for.

use std::collections::BTreeMap;

use crate::bits::BitString;
use crate::config::RunConfig;
use crate::enumerate::{enumerate_domain, DomainTable};
use crate::error::{QueryError, TableError};
use crate::soph::SophTable;
use crate::tables::{Mode, Tables};

pub struct Lab {
    pub config: RunConfig,
    pub domain: DomainTable,
    pub tables: Tables,
    pub soph_qp: SophTable,
    pub soph_qk: SophTable,
    cond_cache: BTreeMap<BitString, (DomainTable, Tables)>,
}

impl Lab {
    /// Derive everything from an existing domain table. Fails only if the
    /// literal cutoff is requested with outputs too long to index.
    pub fn from_domain(config: RunConfig, domain: DomainTable) -> Result<Lab, QueryError> {
        let tables = Tables::build(&domain, config.cutoff)?;
        let soph_qp = SophTable::build(&tables, Mode::Qp, config.soph_params());
        let soph_qk = SophTable::build(&tables, Mode::Qk, config.soph_params());
        Ok(Lab { config, domain, tables, soph_qp, soph_qk, cond_cache: BTreeMap::new() })
    }

    /// Enumerate and derive in one go.
    pub fn build(config: RunConfig) -> Result<Lab, LabError> {
        let domain = enumerate_domain(&config.enum_config(), config.workers)?;
        Ok(Lab::from_domain(config, domain)?)
    }

    pub fn soph(&self, mode: Mode) -> &SophTable {
        match mode {
            Mode::Qp => &self.soph_qp,
            Mode::Qk => &self.soph_qk,
        }
    }

    /// Tables for a conditional enumeration with the given aux, at the
    /// reduced conditional length bound. Cached per aux.
    pub fn conditional(&mut self, aux: &BitString) -> Result<&Tables, LabError> {
        if !self.cond_cache.contains_key(aux) {
            let cfg = self.config.cond_enum_config(aux.clone());
            let domain = enumerate_domain(&cfg, self.config.workers)?;
            let tables = Tables::build(&domain, self.config.cutoff)?;
            self.cond_cache.insert(aux.clone(), (domain, tables));
        }
        Ok(&self.cond_cache[aux].1)
    }

    /// Number of cached conditional enumerations.
    pub fn conditional_count(&self) -> usize {
        self.cond_cache.len()
    }

    /// Tables for an already-enumerated condition; the base condition or
    /// any cached conditional. Unlike [`Lab::conditional`] this never
    /// enumerates.
    pub fn tables_for(&self, condition: &BitString) -> Result<&Tables, QueryError> {
        if *condition == self.config.aux {
            return Ok(&self.tables);
        }
        self.cond_cache
            .get(condition)
            .map(|(_, t)| t)
            .ok_or_else(|| QueryError::MissingTable { condition: condition.to_string() })
    }

    /// K_t(x | condition) against any enumerated condition.
    pub fn k_of(
        &self,
        x: &BitString,
        bound: crate::tables::TimeBound,
        condition: &BitString,
    ) -> Result<Option<u32>, QueryError> {
        Ok(self.tables_for(condition)?.k_of(x, bound))
    }
}

#[derive(Debug, thiserror::Error)]
pub enum LabError {
    #[error(transparent)]
    Table(#[from] TableError),
    #[error(transparent)]
    Query(#[from] QueryError),
}
