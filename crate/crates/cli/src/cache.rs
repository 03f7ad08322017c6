//! On-disk cache of p-adic form expansions.
//!
//! One file per `(form id, p, B, N)`:
//!
//! ```text
//! p B N form-id sha256
//! ring padic p B
//! offset 0
//! trunc N
//! a_0
//! ...
//! ```
//!
//! The digest covers everything after the header line. A file that fails to
//! parse or verify is treated as a miss and rewritten.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use asdlab_core::{PadicContext, Series};
use sha2::{Digest, Sha256};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CacheKey {
    pub form_id: String,
    pub p: u64,
    pub prec: u32,
    pub trunc: usize,
}

impl CacheKey {
    pub fn new(form_id: &str, ctx: &PadicContext, trunc: usize) -> Self {
        CacheKey {
            form_id: form_id.to_string(),
            p: ctx.p(),
            prec: ctx.prec(),
            trunc,
        }
    }

    fn file_name(&self) -> String {
        let id: String = self
            .form_id
            .chars()
            .map(|c| {
                if c.is_ascii_alphanumeric() || c == '-' || c == '_' {
                    c
                } else {
                    '_'
                }
            })
            .collect();
        format!("{id}-p{}-B{}-N{}.series", self.p, self.prec, self.trunc)
    }

    fn header(&self, sha: &str) -> String {
        format!(
            "{} {} {} {} {sha}",
            self.p, self.prec, self.trunc, self.form_id
        )
    }
}

#[derive(Clone, Debug)]
pub struct SeriesCache {
    dir: PathBuf,
}

impl SeriesCache {
    pub fn open(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir).with_context(|| format!("creating cache dir {}", dir.display()))?;
        Ok(SeriesCache {
            dir: dir.to_path_buf(),
        })
    }

    pub fn path(&self, key: &CacheKey) -> PathBuf {
        self.dir.join(key.file_name())
    }

    pub fn load(&self, key: &CacheKey) -> Option<Series<PadicContext>> {
        let text = fs::read_to_string(self.path(key)).ok()?;
        let (header, body) = text.split_once('\n')?;
        let sha = hex::encode(Sha256::digest(body.as_bytes()));
        if header != key.header(&sha) {
            return None;
        }
        let ctx = PadicContext::new(key.p, key.prec).ok()?;
        let series = Series::from_text(&ctx, body).ok()?;
        (series.trunc() == key.trunc as i64 && series.offset() == 0).then_some(series)
    }

    /// Writes through a temporary file and a rename, so readers never see a
    /// partial entry.
    pub fn store(&self, key: &CacheKey, series: &Series<PadicContext>) -> Result<()> {
        let body = series.to_text();
        let sha = hex::encode(Sha256::digest(body.as_bytes()));
        let path = self.path(key);
        let tmp = path.with_extension(format!("tmp{}", std::process::id()));
        {
            let mut f =
                fs::File::create(&tmp).with_context(|| format!("writing {}", tmp.display()))?;
            writeln!(f, "{}", key.header(&sha))?;
            f.write_all(body.as_bytes())?;
            f.sync_all()?;
        }
        fs::rename(&tmp, &path).with_context(|| format!("renaming into {}", path.display()))?;
        Ok(())
    }

    /// Cached series for `key`, computing and storing it on a miss. The flag
    /// reports a hit.
    pub fn get_or_compute(
        &self,
        key: &CacheKey,
        compute: impl FnOnce() -> asdlab_core::Result<Series<PadicContext>>,
    ) -> Result<(Series<PadicContext>, bool)> {
        if let Some(s) = self.load(key) {
            return Ok((s, true));
        }
        let s = compute()?;
        self.store(key, &s)?;
        Ok((s, false))
    }
}
