//! Chunked file storage across fixed-capacity storage contracts.
//!
//! A file is split into chunks, each chunk written to one cell of a
//! storage contract, and the `(contract, index, hash)` of every chunk is
//! recorded in a [`ChunkMap`] held by the mapping index. Reconstruction
//! concatenates the cells and checks every hash along the way.

use std::collections::BTreeMap;

use rand::RngCore;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::crypto::layered::{layered_encrypt, LayeredCiphertext};
use crate::crypto::{GroupElement, Ristretto};
use crate::hash::{sha256, Digest32};
use crate::will::{ComponentOutput, ComponentSpec};

pub const DEFAULT_CHUNK_SIZE: usize = 1024;
pub const MAX_CHUNK_SIZE: usize = 4096;
pub const CELLS_PER_CONTRACT: u32 = 64;

/// Message prefix of a component output that points at a stored deed.
pub const DEED_PREFIX: &str = "deed:";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VaultError {
    #[error("validation error: {0}")]
    Validation(String),
    #[error("chunk {position} missing from {contract}[{index}]")]
    ChunkMissing {
        position: usize,
        contract: String,
        index: u32,
    },
    #[error("corruption detected in chunk {position}")]
    CorruptionDetected { position: usize },
    #[error("cell {contract}[{index}] is already written")]
    CellOccupied { contract: String, index: u32 },
    #[error("storage capacity exhausted")]
    CapacityExhausted,
    #[error("unknown file {0}")]
    UnknownFile(String),
}

/// `𝒞(F)`: all chunks are exactly `chunk_size` bytes except possibly the
/// last. An empty file has no chunks.
pub fn chunk(file: &[u8], chunk_size: usize) -> Result<Vec<&[u8]>, VaultError> {
    if chunk_size == 0 {
        return Err(VaultError::Validation(
            "chunk size must be at least 1".into(),
        ));
    }
    Ok(file.chunks(chunk_size).collect())
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StorageCell {
    pub contract_id: String,
    pub cells: BTreeMap<u32, Cell>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Cell(#[serde(with = "crate::codec::hex_bytes")] pub Vec<u8>);

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChunkEntry {
    pub contract: String,
    pub index: u32,
    #[serde(with = "crate::codec::hex32")]
    pub hash: Digest32,
    pub len: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChunkMap {
    #[serde(with = "crate::codec::hex32")]
    pub file_id: Digest32,
    pub entries: Vec<ChunkEntry>,
    pub total_size: u64,
}

impl ChunkMap {
    pub fn file_id_hex(&self) -> String {
        hex::encode(self.file_id)
    }
}

/// Everything of an encrypted deed except its body, which lives in cells.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeedHeader {
    pub outer_kem: GroupElement,
    #[serde(with = "crate::codec::hex_bytes")]
    pub tag: Vec<u8>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Vault {
    pub max_chunk_size: usize,
    pub cells_per_contract: u32,
    pub max_contracts: usize,
    pub contracts: Vec<StorageCell>,
    /// The mapping index, keyed by hex file id.
    pub maps: BTreeMap<String, ChunkMap>,
    pub deeds: BTreeMap<String, DeedHeader>,
    #[serde(skip)]
    first_open: usize,
}

impl Default for Vault {
    fn default() -> Self {
        Vault::new(MAX_CHUNK_SIZE, CELLS_PER_CONTRACT, usize::MAX)
    }
}

impl Vault {
    pub fn new(max_chunk_size: usize, cells_per_contract: u32, max_contracts: usize) -> Self {
        Vault {
            max_chunk_size,
            cells_per_contract,
            max_contracts,
            contracts: Vec::new(),
            maps: BTreeMap::new(),
            deeds: BTreeMap::new(),
            first_open: 0,
        }
    }

    fn contract_index(&self, contract: &str) -> Option<usize> {
        // ids are "sc-<n>" with n the position
        contract
            .strip_prefix("sc-")
            .and_then(|n| n.parse::<usize>().ok())
            .filter(|&i| i < self.contracts.len() && self.contracts[i].contract_id == contract)
    }

    /// First free `(contract, index)` in placement order, creating a new
    /// storage contract when all existing ones are full.
    fn allocate(&mut self) -> Result<(usize, u32), VaultError> {
        while self.first_open < self.contracts.len() {
            let sc = &self.contracts[self.first_open];
            if let Some(idx) = (0..self.cells_per_contract).find(|i| !sc.cells.contains_key(i)) {
                return Ok((self.first_open, idx));
            }
            self.first_open += 1;
        }
        if self.contracts.len() >= self.max_contracts {
            return Err(VaultError::CapacityExhausted);
        }
        let id = format!("sc-{}", self.contracts.len());
        self.contracts.push(StorageCell {
            contract_id: id,
            cells: BTreeMap::new(),
        });
        Ok((self.contracts.len() - 1, 0))
    }

    pub fn write_cell(
        &mut self,
        contract: &str,
        index: u32,
        bytes: Vec<u8>,
    ) -> Result<(), VaultError> {
        if bytes.len() > self.max_chunk_size {
            return Err(VaultError::Validation(format!(
                "cell of {} bytes exceeds max chunk size {}",
                bytes.len(),
                self.max_chunk_size
            )));
        }
        let i = self.contract_index(contract).ok_or_else(|| {
            VaultError::Validation(format!("unknown storage contract {contract}"))
        })?;
        let sc = &mut self.contracts[i];
        if sc.cells.contains_key(&index) {
            return Err(VaultError::CellOccupied {
                contract: contract.to_string(),
                index,
            });
        }
        if index >= self.cells_per_contract {
            return Err(VaultError::Validation(format!(
                "cell index {index} out of range"
            )));
        }
        sc.cells.insert(index, Cell(bytes));
        Ok(())
    }

    pub fn read_cell(&self, contract: &str, index: u32) -> Option<&[u8]> {
        let i = self.contract_index(contract)?;
        self.contracts[i].cells.get(&index).map(|c| c.0.as_slice())
    }

    pub fn store_file(&mut self, file: &[u8], chunk_size: usize) -> Result<ChunkMap, VaultError> {
        if chunk_size > self.max_chunk_size {
            return Err(VaultError::Validation(format!(
                "chunk size {chunk_size} exceeds max {}",
                self.max_chunk_size
            )));
        }
        let chunks = chunk(file, chunk_size)?;
        let mut entries = Vec::with_capacity(chunks.len());
        for piece in chunks {
            let (ci, index) = self.allocate()?;
            let contract = self.contracts[ci].contract_id.clone();
            self.write_cell(&contract, index, piece.to_vec())?;
            entries.push(ChunkEntry {
                contract,
                index,
                hash: sha256(piece),
                len: piece.len() as u64,
            });
        }
        let map = ChunkMap {
            file_id: sha256(file),
            entries,
            total_size: file.len() as u64,
        };
        self.maps.insert(map.file_id_hex(), map.clone());
        Ok(map)
    }

    /// `ℛ`: concatenates the chunks and verifies the result.
    pub fn retrieve_file(&self, map: &ChunkMap) -> Result<Vec<u8>, VaultError> {
        let mut out = Vec::with_capacity(map.total_size as usize);
        for (position, e) in map.entries.iter().enumerate() {
            let bytes =
                self.read_cell(&e.contract, e.index)
                    .ok_or_else(|| VaultError::ChunkMissing {
                        position,
                        contract: e.contract.clone(),
                        index: e.index,
                    })?;
            if sha256(bytes) != e.hash || bytes.len() as u64 != e.len {
                return Err(VaultError::CorruptionDetected { position });
            }
            out.extend_from_slice(bytes);
        }
        if sha256(&out) != map.file_id || out.len() as u64 != map.total_size {
            return Err(VaultError::CorruptionDetected {
                position: map.entries.len(),
            });
        }
        Ok(out)
    }

    pub fn chunk_map(&self, file_id_hex: &str) -> Result<&ChunkMap, VaultError> {
        self.maps
            .get(file_id_hex)
            .ok_or_else(|| VaultError::UnknownFile(file_id_hex.to_string()))
    }

    /// Fault injection: drops a cell. Freed cells become eligible for
    /// first-fit placement again.
    pub fn delete_cell(&mut self, contract: &str, index: u32) -> bool {
        match self.contract_index(contract) {
            Some(i) => {
                let removed = self.contracts[i].cells.remove(&index).is_some();
                if removed {
                    self.first_open = self.first_open.min(i);
                }
                removed
            }
            None => false,
        }
    }

    /// Fault injection: flips bits in one byte of a stored cell.
    pub fn tamper_cell(&mut self, contract: &str, index: u32, offset: usize, xor: u8) -> bool {
        let Some(i) = self.contract_index(contract) else {
            return false;
        };
        match self.contracts[i].cells.get_mut(&index) {
            Some(cell) if offset < cell.0.len() => {
                cell.0[offset] ^= xor;
                true
            }
            _ => false,
        }
    }

    /// Encrypts a deed to the beneficiary and temporary keys, stores the
    /// ciphertext body in cells, and points `component` at it.
    pub fn store_deed(
        &mut self,
        deed: &[u8],
        beneficiary_pk: &GroupElement,
        temporary_pk: &GroupElement,
        component: &mut ComponentSpec,
        chunk_size: usize,
        rng: &mut impl RngCore,
    ) -> Result<(ChunkMap, LayeredCiphertext<Ristretto>), VaultError> {
        let c = layered_encrypt::<Ristretto>(deed, beneficiary_pk, temporary_pk, rng);
        let map = self.store_file(&c.outer_body, chunk_size)?;
        self.deeds.insert(
            map.file_id_hex(),
            DeedHeader {
                outer_kem: c.outer_kem,
                tag: c.tag.clone(),
            },
        );
        component.output = ComponentOutput::Emit {
            message: format!("{DEED_PREFIX}{}", map.file_id_hex()),
        };
        let header = LayeredCiphertext {
            outer_kem: c.outer_kem,
            outer_body: Vec::new(),
            tag: c.tag,
        };
        Ok((map, header))
    }

    /// Reassembles the full layered ciphertext of a stored deed.
    pub fn load_deed(&self, file_id_hex: &str) -> Result<LayeredCiphertext<Ristretto>, VaultError> {
        let header = self
            .deeds
            .get(file_id_hex)
            .ok_or_else(|| VaultError::UnknownFile(file_id_hex.to_string()))?;
        let body = self.retrieve_file(self.chunk_map(file_id_hex)?)?;
        Ok(LayeredCiphertext {
            outer_kem: header.outer_kem,
            outer_body: body,
            tag: header.tag.clone(),
        })
    }

    pub fn restore_cursor(&mut self) {
        self.first_open = 0;
    }
}

/// The deed a component output points at, if any.
pub fn deed_reference(output: &ComponentOutput) -> Option<&str> {
    match output {
        ComponentOutput::Emit { message } => message.strip_prefix(DEED_PREFIX),
        _ => None,
    }
}
