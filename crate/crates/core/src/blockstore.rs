//! Binary population files and their division into fixed-byte-size blocks.
//!
//! Layout (all little-endian):
//!
//! ```text
//! offset  size  field
//!      0     8  magic "BLOCKGA\0"
//!      8     4  u32 format version (1)
//!     12     4  u32 dimension D
//!     16     8  u64 chromosome count
//!     24     8  f64 lower bound
//!     32     8  f64 upper bound
//!     40     8  u64 generator seed
//!     48     …  count records of (D genes + 1 fitness) f64 values
//! ```
//!
//! An unset fitness is stored as NaN. Records are fixed width, so block `i`
//! of a manifest can be read with a single seek.
//!
//! The manifest sidecar is plain text: a `block_size_bytes <n>` line, a
//! `record_size <n>` line, then one `block_index chromosome_offset count`
//! line per block.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Seek, SeekFrom, Write};
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::ga::{random_chromosomes, Chromosome, Population};
use crate::objective::ObjectiveSpec;
use crate::rng::RngStream;

pub const MAGIC: [u8; 8] = *b"BLOCKGA\0";
pub const FORMAT_VERSION: u32 = 1;
pub const HEADER_SIZE: u64 = 48;
/// 128 MiB, the usual distributed-filesystem default block size.
pub const DEFAULT_BLOCK_SIZE: u64 = 128 * 1024 * 1024;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PopulationFileHeader {
    pub format_version: u32,
    pub dimension: u32,
    pub chromosome_count: u64,
    pub lower_bound: f64,
    pub upper_bound: f64,
    pub generator_seed: u64,
}

impl PopulationFileHeader {
    pub fn new(spec: &ObjectiveSpec, chromosome_count: u64, generator_seed: u64) -> Result<Self> {
        spec.validate()?;
        let dimension = u32::try_from(spec.dimension)
            .map_err(|_| Error::config(format!("dimension {} does not fit in u32", spec.dimension)))?;
        Ok(Self {
            format_version: FORMAT_VERSION,
            dimension,
            chromosome_count,
            lower_bound: spec.lower_bound,
            upper_bound: spec.upper_bound,
            generator_seed,
        })
    }

    /// Bytes per chromosome record: `8 * (D + 1)`.
    pub fn record_size(&self) -> u64 {
        record_size(self.dimension as usize)
    }

    pub fn payload_bytes(&self) -> u64 {
        self.chromosome_count * self.record_size()
    }

    pub fn file_len(&self) -> u64 {
        HEADER_SIZE + self.payload_bytes()
    }

    /// An objective spec carrying this file's dimension and bounds.
    pub fn objective_spec(&self, name: &str) -> ObjectiveSpec {
        ObjectiveSpec {
            name: name.to_owned(),
            dimension: self.dimension as usize,
            lower_bound: self.lower_bound,
            upper_bound: self.upper_bound,
        }
    }

    pub fn encode(&self) -> [u8; HEADER_SIZE as usize] {
        let mut out = [0u8; HEADER_SIZE as usize];
        out[0..8].copy_from_slice(&MAGIC);
        out[8..12].copy_from_slice(&self.format_version.to_le_bytes());
        out[12..16].copy_from_slice(&self.dimension.to_le_bytes());
        out[16..24].copy_from_slice(&self.chromosome_count.to_le_bytes());
        out[24..32].copy_from_slice(&self.lower_bound.to_le_bytes());
        out[32..40].copy_from_slice(&self.upper_bound.to_le_bytes());
        out[40..48].copy_from_slice(&self.generator_seed.to_le_bytes());
        out
    }

    pub fn decode(bytes: &[u8; HEADER_SIZE as usize]) -> std::result::Result<Self, String> {
        if bytes[0..8] != MAGIC {
            return Err("bad magic".into());
        }
        let u32_at = |o: usize| u32::from_le_bytes(bytes[o..o + 4].try_into().unwrap());
        let u64_at = |o: usize| u64::from_le_bytes(bytes[o..o + 8].try_into().unwrap());
        let f64_at = |o: usize| f64::from_le_bytes(bytes[o..o + 8].try_into().unwrap());
        let header = Self {
            format_version: u32_at(8),
            dimension: u32_at(12),
            chromosome_count: u64_at(16),
            lower_bound: f64_at(24),
            upper_bound: f64_at(32),
            generator_seed: u64_at(40),
        };
        if header.format_version != FORMAT_VERSION {
            return Err(format!("unsupported format version {}", header.format_version));
        }
        if header.dimension == 0 {
            return Err("dimension 0".into());
        }
        Ok(header)
    }
}

pub fn record_size(dimension: usize) -> u64 {
    8 * (dimension as u64 + 1)
}

fn encode_record(c: &Chromosome, buf: &mut Vec<u8>) {
    for g in c.genes() {
        buf.extend_from_slice(&g.to_le_bytes());
    }
    buf.extend_from_slice(&c.fitness().unwrap_or(f64::NAN).to_le_bytes());
}

fn decode_record(bytes: &[u8], dimension: usize) -> Chromosome {
    let mut values = bytes.chunks_exact(8).map(|b| f64::from_le_bytes(b.try_into().unwrap()));
    let genes: Vec<f64> = values.by_ref().take(dimension).collect();
    let fitness = values.next().filter(|f| !f.is_nan());
    Chromosome::from_parts(genes, fitness)
}

fn format_err(path: &Path, reason: impl Into<String>) -> Error {
    Error::Format {
        path: path.to_path_buf(),
        reason: reason.into(),
    }
}

/// The in-memory population that [`generate_population_file`] writes for the
/// same arguments.
pub fn generate_population(count: usize, spec: &ObjectiveSpec, seed: u64) -> Result<Population> {
    spec.validate()?;
    let mut rng = RngStream::new(seed);
    Population::new(random_chromosomes(count, spec.dimension, spec.lower_bound, spec.upper_bound, &mut rng).collect())
}

/// Streams `count` uniformly initialized chromosomes to `path`.
pub fn generate_population_file(
    path: impl AsRef<Path>,
    count: u64,
    spec: &ObjectiveSpec,
    seed: u64,
) -> Result<PopulationFileHeader> {
    if count == 0 {
        return Err(Error::config("chromosome count must be at least 1"));
    }
    let header = PopulationFileHeader::new(spec, count, seed)?;
    let mut rng = RngStream::new(seed);
    let chromosomes = random_chromosomes(
        count as usize,
        spec.dimension,
        spec.lower_bound,
        spec.upper_bound,
        &mut rng,
    );
    write_records(path.as_ref(), &header, chromosomes)?;
    Ok(header)
}

/// Writes `population` with a header derived from `spec` and `seed`.
pub fn write_population(
    path: impl AsRef<Path>,
    population: &Population,
    spec: &ObjectiveSpec,
    seed: u64,
) -> Result<PopulationFileHeader> {
    if population.is_empty() {
        return Err(Error::degenerate("cannot write an empty population"));
    }
    if let Some(c) = population.members().iter().find(|c| c.dimension() != spec.dimension) {
        return Err(Error::config(format!(
            "chromosome has {} genes but the file declares D={}",
            c.dimension(),
            spec.dimension
        )));
    }
    let header = PopulationFileHeader::new(spec, population.len() as u64, seed)?;
    write_records(path.as_ref(), &header, population.members().iter().cloned())?;
    Ok(header)
}

fn write_records(path: &Path, header: &PopulationFileHeader, records: impl Iterator<Item = Chromosome>) -> Result<()> {
    let mut out = BufWriter::with_capacity(1 << 20, File::create(path)?);
    out.write_all(&header.encode())?;
    let mut buf = Vec::with_capacity(header.record_size() as usize);
    for c in records {
        buf.clear();
        encode_record(&c, &mut buf);
        out.write_all(&buf)?;
    }
    out.into_inner().map_err(|e| e.into_error())?.sync_all()?;
    Ok(())
}

fn open_checked(path: &Path) -> Result<(File, PopulationFileHeader)> {
    let mut file = File::open(path)?;
    let mut raw = [0u8; HEADER_SIZE as usize];
    file.read_exact(&mut raw)
        .map_err(|_| format_err(path, "file shorter than the header"))?;
    let header = PopulationFileHeader::decode(&raw).map_err(|r| format_err(path, r))?;
    let actual = file.metadata()?.len();
    if actual != header.file_len() {
        return Err(format_err(
            path,
            format!(
                "length {actual} does not match header ({} records of {} bytes + {HEADER_SIZE})",
                header.chromosome_count,
                header.record_size()
            ),
        ));
    }
    Ok((file, header))
}

pub fn read_header(path: impl AsRef<Path>) -> Result<PopulationFileHeader> {
    open_checked(path.as_ref()).map(|(_, h)| h)
}

fn read_range(
    path: &Path,
    file: &mut File,
    header: &PopulationFileHeader,
    offset: u64,
    count: u64,
) -> Result<Population> {
    let rs = header.record_size();
    file.seek(SeekFrom::Start(HEADER_SIZE + offset * rs))?;
    let mut bytes = vec![0u8; (count * rs) as usize];
    file.read_exact(&mut bytes)
        .map_err(|_| format_err(path, "truncated record data"))?;
    let dim = header.dimension as usize;
    Population::new(bytes.chunks_exact(rs as usize).map(|r| decode_record(r, dim)).collect())
}

/// Reads every chromosome in the file.
pub fn read_population(path: impl AsRef<Path>) -> Result<(PopulationFileHeader, Population)> {
    let path = path.as_ref();
    let (mut file, header) = open_checked(path)?;
    let pop = read_range(path, &mut file, &header, 0, header.chromosome_count)?;
    Ok((header, pop))
}

/// Reads the chromosomes of one block, in file order.
pub fn read_block(path: impl AsRef<Path>, manifest: &BlockManifest, block_index: usize) -> Result<Population> {
    let path = path.as_ref();
    let entry = manifest.entries.get(block_index).ok_or(Error::BlockOutOfRange {
        index: block_index,
        count: manifest.entries.len(),
    })?;
    let (mut file, header) = open_checked(path)?;
    if manifest.record_size != header.record_size() {
        return Err(format_err(
            path,
            format!(
                "manifest record size {} differs from file record size {}",
                manifest.record_size,
                header.record_size()
            ),
        ));
    }
    if entry.chromosome_offset + entry.chromosome_count > header.chromosome_count {
        return Err(format_err(
            path,
            format!(
                "block {block_index} extends past the {} records in the file",
                header.chromosome_count
            ),
        ));
    }
    read_range(
        path,
        &mut file,
        &header,
        entry.chromosome_offset,
        entry.chromosome_count,
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BlockEntry {
    pub block_index: usize,
    pub chromosome_offset: u64,
    pub chromosome_count: u64,
}

/// Contiguous partition of a population file into blocks of at most
/// `block_size_bytes` serialized bytes each.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockManifest {
    pub block_size_bytes: u64,
    pub record_size: u64,
    pub entries: Vec<BlockEntry>,
}

impl BlockManifest {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Whole records that fit in one block.
    pub fn capacity(&self) -> u64 {
        self.block_size_bytes / self.record_size
    }

    pub fn total_chromosomes(&self) -> u64 {
        self.entries.iter().map(|e| e.chromosome_count).sum()
    }

    pub fn smallest_block(&self) -> u64 {
        self.entries.iter().map(|e| e.chromosome_count).min().unwrap_or(0)
    }

    /// Checks the partition invariants against a total chromosome count.
    pub fn validate(&self, chromosome_count: u64) -> Result<()> {
        let cap = self.capacity();
        if cap == 0 {
            return Err(Error::config("manifest block size is smaller than one record"));
        }
        let mut next = 0u64;
        for (i, e) in self.entries.iter().enumerate() {
            let last = i + 1 == self.entries.len();
            if e.block_index != i || e.chromosome_offset != next || e.chromosome_count == 0 {
                return Err(Error::config(format!(
                    "manifest entry {i} breaks the contiguous partition"
                )));
            }
            if e.chromosome_count > cap || (!last && e.chromosome_count != cap) {
                return Err(Error::config(format!(
                    "manifest entry {i} holds {} records; capacity is {cap}",
                    e.chromosome_count
                )));
            }
            next += e.chromosome_count;
        }
        if next != chromosome_count {
            return Err(Error::config(format!(
                "manifest covers {next} chromosomes, file has {chromosome_count}"
            )));
        }
        Ok(())
    }
}

/// Number of blocks needed for `total_bytes` of data.
pub fn blocks_for_bytes(total_bytes: u64, block_size_bytes: u64) -> u64 {
    total_bytes.div_ceil(block_size_bytes)
}

pub fn split_into_blocks(header: &PopulationFileHeader, block_size_bytes: u64) -> Result<BlockManifest> {
    let record_size = header.record_size();
    if block_size_bytes < record_size {
        return Err(Error::config(format!(
            "block size {block_size_bytes} bytes cannot hold one {record_size}-byte record"
        )));
    }
    let capacity = block_size_bytes / record_size;
    let total = header.chromosome_count;
    let blocks = total.div_ceil(capacity);
    let entries = (0..blocks)
        .map(|i| {
            let offset = i * capacity;
            BlockEntry {
                block_index: i as usize,
                chromosome_offset: offset,
                chromosome_count: capacity.min(total - offset),
            }
        })
        .collect();
    Ok(BlockManifest {
        block_size_bytes,
        record_size,
        entries,
    })
}

/// Sidecar path used by the CLI: `<population>.manifest`.
pub fn manifest_path_for(population_path: &Path) -> PathBuf {
    let mut s = population_path.as_os_str().to_owned();
    s.push(".manifest");
    PathBuf::from(s)
}

pub fn write_manifest(path: impl AsRef<Path>, manifest: &BlockManifest) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    writeln!(out, "block_size_bytes {}", manifest.block_size_bytes)?;
    writeln!(out, "record_size {}", manifest.record_size)?;
    for e in &manifest.entries {
        writeln!(out, "{} {} {}", e.block_index, e.chromosome_offset, e.chromosome_count)?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_manifest(path: impl AsRef<Path>) -> Result<BlockManifest> {
    let path = path.as_ref();
    let reader = BufReader::new(File::open(path)?);
    let mut block_size_bytes = None;
    let mut record_size = None;
    let mut entries = Vec::new();
    for (n, line) in reader.lines().enumerate() {
        let line = line?;
        let fields: Vec<&str> = line.split_whitespace().collect();
        let bad = || format_err(path, format!("malformed manifest line {}: `{line}`", n + 1));
        let num = |s: &str| s.parse::<u64>().map_err(|_| bad());
        match fields.as_slice() {
            [] => continue,
            ["block_size_bytes", v] => block_size_bytes = Some(num(v)?),
            ["record_size", v] => record_size = Some(num(v)?),
            [i, o, c] => entries.push(BlockEntry {
                block_index: num(i)? as usize,
                chromosome_offset: num(o)?,
                chromosome_count: num(c)?,
            }),
            _ => return Err(bad()),
        }
    }
    let missing = |what: &str| format_err(path, format!("manifest lacks `{what}`"));
    let manifest = BlockManifest {
        block_size_bytes: block_size_bytes.ok_or_else(|| missing("block_size_bytes"))?,
        record_size: record_size.ok_or_else(|| missing("record_size"))?,
        entries,
    };
    if manifest.record_size == 0 {
        return Err(format_err(path, "record_size 0"));
    }
    manifest.validate(manifest.total_chromosomes())?;
    Ok(manifest)
}
