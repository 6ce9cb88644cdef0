use rand::RngCore;

use crate::chain::state::ChainState;
use crate::chain::ChainError;
use crate::crypto::layered::layered_decrypt_outer;
use crate::crypto::{GroupElement, LayeredCiphertext, Ristretto, Scalar};
use crate::vault::{deed_reference, ChunkMap};
use crate::will::{ComponentSpec, ComponentState, Did};

impl ChainState {
    pub fn store_file(
        &mut self,
        file: &[u8],
        chunk_size: Option<usize>,
    ) -> Result<ChunkMap, ChainError> {
        let map = self
            .vault
            .store_file(file, chunk_size.unwrap_or(self.params.chunk_size))?;
        self.emit(
            "file_stored",
            &[
                ("file_id", map.file_id_hex()),
                ("chunks", map.entries.len().to_string()),
                ("size", map.total_size.to_string()),
            ],
        );
        Ok(map)
    }

    pub fn retrieve_file(&self, file_id_hex: &str) -> Result<Vec<u8>, ChainError> {
        let map = self.vault.chunk_map(file_id_hex)?;
        Ok(self.vault.retrieve_file(map)?)
    }

    /// Encrypts a deed for `beneficiary_pk` under the temporary key, stores
    /// it and rewrites `component` to announce it on execution.
    pub fn store_deed(
        &mut self,
        deed: &[u8],
        beneficiary_pk: &GroupElement,
        temporary_pk: &GroupElement,
        component: &mut ComponentSpec,
        rng: &mut impl RngCore,
    ) -> Result<(ChunkMap, LayeredCiphertext), ChainError> {
        let chunk_size = self.params.chunk_size;
        let (map, header) = self.vault.store_deed(
            deed,
            beneficiary_pk,
            temporary_pk,
            component,
            chunk_size,
            rng,
        )?;
        self.emit(
            "deed_stored",
            &[
                ("file_id", map.file_id_hex()),
                ("chunks", map.entries.len().to_string()),
            ],
        );
        Ok((map, header))
    }

    /// Publishes the temporary-key layer of an executed deed component.
    /// Returns the inner ciphertext, which only the beneficiary can open.
    pub fn reveal_key(
        &mut self,
        did: &Did,
        component: &str,
        temporary_sk: &Scalar,
    ) -> Result<Vec<u8>, ChainError> {
        let will = self.will(did)?;
        let comp = &will.components[will.component_index(component)?];
        let file = deed_reference(&comp.output)
            .ok_or_else(|| {
                ChainError::Validation(format!("component {component} does not reference a deed"))
            })?
            .to_string();
        if !will.is_expired() || comp.state != ComponentState::Executed {
            return Err(ChainError::PrematureReveal(format!(
                "component {component} of {did} has not executed"
            )));
        }
        let c = self.vault.load_deed(&file)?;
        let inner = layered_decrypt_outer::<Ristretto>(&c, temporary_sk)?;
        self.emit(
            "key_revealed",
            &[
                ("did", did.to_string()),
                ("component", component.to_string()),
                ("file_id", file),
                ("inner", hex::encode(&inner)),
            ],
        );
        Ok(inner)
    }
}
