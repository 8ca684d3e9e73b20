//! `.hpnn` model files.
//!
//! ```text
//! magic       4 bytes  "HPNN"
//! version     u32 LE   currently 1
//! desc_len    u32 LE
//! descriptor  desc_len bytes of UTF-8 `key=value` lines:
//!               problem=<tag>
//!               model=<tag>
//!               kind=plain|hyper
//!               net=<arch>            (plain)
//!               hyper=<arch>, main=<arch>   (hyper)
//!               params=<count>
//! count       u64 LE   must equal `params`
//! values      count × f64 LE, trainable parameters in layer-major layout
//! ```
//!
//! `<arch>` is the [`ArchSpec`] display form, e.g. `2-8-8-1/tanh`.

use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::path::Path;

use super::arch::ArchSpec;
use super::hyper::{Net, NetArch};
use crate::error::{Error, Result};

pub const MAGIC: &[u8; 4] = b"HPNN";
pub const VERSION: u32 = 1;
pub const EXTENSION: &str = "hpnn";

/// A network plus the tags that say what it was trained for.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelFile {
    pub problem: String,
    pub model: String,
    pub net: Net,
}

impl ModelFile {
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut desc = format!("problem={}\nmodel={}\n", self.problem, self.model);
        match self.net.arch() {
            NetArch::Plain(s) => desc.push_str(&format!("kind=plain\nnet={s}\n")),
            NetArch::Hyper { hyper, main } => {
                desc.push_str(&format!("kind=hyper\nhyper={hyper}\nmain={main}\n"))
            }
        }
        let values = self.net.trainable();
        desc.push_str(&format!("params={}\n", values.len()));

        let mut out = Vec::with_capacity(20 + desc.len() + 8 * values.len());
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&VERSION.to_le_bytes());
        out.extend_from_slice(&(desc.len() as u32).to_le_bytes());
        out.extend_from_slice(desc.as_bytes());
        out.extend_from_slice(&(values.len() as u64).to_le_bytes());
        for v in values {
            out.extend_from_slice(&v.to_le_bytes());
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut cur = bytes;
        let magic = take(&mut cur, 4)?;
        if magic != MAGIC {
            return Err(Error::load("not an .hpnn file (bad magic)"));
        }
        let version = u32::from_le_bytes(take(&mut cur, 4)?.try_into().unwrap());
        if version != VERSION {
            return Err(Error::load(format!("unsupported .hpnn version {version}")));
        }
        let desc_len = u32::from_le_bytes(take(&mut cur, 4)?.try_into().unwrap()) as usize;
        let desc = std::str::from_utf8(take(&mut cur, desc_len)?)
            .map_err(|_| Error::load("descriptor is not UTF-8"))?;
        let fields = parse_descriptor(desc)?;
        let get = |k: &str| {
            fields
                .get(k)
                .map(String::as_str)
                .ok_or_else(|| Error::load(format!("descriptor lacks `{k}`")))
        };
        let arch = match get("kind")? {
            "plain" => NetArch::Plain(get("net")?.parse::<ArchSpec>()?),
            "hyper" => NetArch::Hyper {
                hyper: get("hyper")?.parse()?,
                main: get("main")?.parse()?,
            },
            other => return Err(Error::load(format!("unknown model kind `{other}`"))),
        };
        let declared: usize = get("params")?
            .parse()
            .map_err(|_| Error::load("`params` is not a count"))?;
        if declared != arch.trainable_count() {
            return Err(Error::load(format!(
                "descriptor declares {declared} parameters, architecture has {}",
                arch.trainable_count()
            )));
        }
        let count = u64::from_le_bytes(take(&mut cur, 8)?.try_into().unwrap()) as usize;
        if count != declared {
            return Err(Error::load(format!(
                "array length {count} disagrees with descriptor count {declared}"
            )));
        }
        let raw = take(&mut cur, count.checked_mul(8).ok_or_else(|| Error::load("count overflow"))?)?;
        if !cur.is_empty() {
            return Err(Error::load(format!("{} trailing bytes after parameter array", cur.len())));
        }
        let values = raw
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
            .collect();
        let net = Net::from_parts(&arch, values).map_err(|e| Error::load(e.to_string()))?;
        Ok(Self {
            problem: get("problem")?.to_string(),
            model: get("model")?.to_string(),
            net,
        })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut f = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        f.write_all(&self.to_bytes()).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let mut bytes = Vec::new();
        std::fs::File::open(path)
            .and_then(|mut f| f.read_to_end(&mut bytes))
            .map_err(|e| Error::io(path, e))?;
        Self::from_bytes(&bytes)
    }
}

fn take<'a>(cur: &mut &'a [u8], n: usize) -> Result<&'a [u8]> {
    if cur.len() < n {
        return Err(Error::load(format!(
            "file truncated: needed {n} more bytes, {} left",
            cur.len()
        )));
    }
    let (head, tail) = cur.split_at(n);
    *cur = tail;
    Ok(head)
}

fn parse_descriptor(desc: &str) -> Result<BTreeMap<String, String>> {
    desc.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| {
            l.split_once('=')
                .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
                .ok_or_else(|| Error::load(format!("malformed descriptor line `{l}`")))
        })
        .collect()
}
