//! Tables shared across a command, optionally backed by a cache file.

use std::fs;
use std::io::ErrorKind;
use std::path::PathBuf;

use galled_census_core::dup_trees::BTable;
use galled_census_core::io::CacheFile;
use galled_census_core::one_component::NTable;
use galled_census_core::{Error, Result};

pub struct Context {
    path: Option<PathBuf>,
    ntable: Option<NTable>,
    btable: Option<BTable>,
    dirty: bool,
}

impl Context {
    /// Loads the cache at `path` if it exists. A missing file is not an error.
    pub fn open(path: Option<PathBuf>) -> Result<Context> {
        let mut ctx = Context {
            path,
            ntable: None,
            btable: None,
            dirty: false,
        };
        let Some(path) = &ctx.path else {
            return Ok(ctx);
        };
        let text = match fs::read_to_string(path) {
            Ok(text) => text,
            Err(e) if e.kind() == ErrorKind::NotFound => return Ok(ctx),
            Err(e) => return Err(Error::Parse(format!("cannot read {}: {e}", path.display()))),
        };
        let file = CacheFile::from_json(&text)?;
        ctx.ntable = file.n_table()?;
        ctx.btable = file.b_table()?;
        Ok(ctx)
    }

    /// The `N` table through at least `n_max`, built or grown on demand.
    pub fn ntable(&mut self, n_max: usize) -> Result<&NTable> {
        let n_max = n_max.max(2);
        if self.ntable.as_ref().is_none_or(|t| t.n_max() < n_max) {
            self.ntable = Some(NTable::build(n_max)?);
            self.dirty = true;
        }
        Ok(self.ntable.as_ref().expect("table was just ensured"))
    }

    /// The `B` table through at least `n_max`, built or grown on demand.
    pub fn btable(&mut self, n_max: usize) -> Result<&BTable> {
        let n_max = n_max.max(2);
        if self.btable.as_ref().is_none_or(|t| t.n_max() < n_max) {
            self.btable = Some(BTable::build(n_max)?);
            self.dirty = true;
        }
        Ok(self.btable.as_ref().expect("table was just ensured"))
    }

    /// Writes the tables back when a cache path is set and a table grew.
    pub fn save(&self) -> std::io::Result<()> {
        let Some(path) = &self.path else {
            return Ok(());
        };
        if !self.dirty {
            return Ok(());
        }
        let text = CacheFile::new(self.ntable.as_ref(), self.btable.as_ref()).to_json();
        let tmp = path.with_extension("tmp");
        fs::write(&tmp, text)?;
        fs::rename(&tmp, path)
    }
}
