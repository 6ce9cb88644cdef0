use crate::chain::state::{ChainState, HandshakeKind};
use crate::chain::ChainError;
use crate::interchain::{
    encapsulate, InterchainError, Packet, PacketData, Phase, Verdict, WILL_PORT,
};
use crate::will::{ComponentOutput, ComponentState, Did};

impl ChainState {
    /// Opens a handshake: sends the encapsulated logic to the entrypoint on
    /// the other end of the output's channel.
    pub(crate) fn send_init(
        &mut self,
        did: &Did,
        component: &str,
        output: &ComponentOutput,
        kind: HandshakeKind,
    ) -> Result<(), ChainError> {
        let will = self.will(did)?;
        let creator = will.creator;
        let channel = self.route(&creator, output).ok_or_else(|| {
            InterchainError::ChannelNotFound(format!("no approved route for {component}"))
        })?;
        let path = self.channels[&channel].clone();
        let claimant = match &kind {
            HandshakeKind::Claim { claimant, .. } => Some(*claimant),
            HandshakeKind::Execution => None,
        };
        let payload = PacketData::Init {
            did: did.clone(),
            component: component.to_string(),
            creator,
            claimant,
            logic: encapsulate(output)?,
        }
        .to_bytes();
        let sequence = self.packets.next_sequence(&channel);
        let key = self
            .packets
            .send(path, sequence, Phase::Init, payload)
            .key();
        self.new_handshake(format!("{channel}/{sequence}"), did, component, kind);
        self.emit(
            "packet_sent",
            &[
                ("key", key),
                ("did", did.to_string()),
                ("component", component.to_string()),
            ],
        );
        Ok(())
    }

    /// Handles a delivered packet. The will module only ever receives
    /// acknowledgements; it answers each with a confirmation.
    pub fn receive_packet(&mut self, packet: &Packet) -> Result<Verdict, ChainError> {
        let key = packet.key();
        let path = &packet.path;
        let own = self.channels.get(&path.channel);
        if path.destination_chain != self.chain_id
            || path.destination_port != WILL_PORT
            || own.is_none_or(|p| p.reversed() != *path)
        {
            return Err(InterchainError::Misrouted(key).into());
        }
        if packet.phase != Phase::Ack {
            return Err(InterchainError::UnexpectedPhase(packet.phase.to_string()).into());
        }
        let PacketData::Ack {
            creator_approved,
            escrow_sufficient,
            already_released,
        } = PacketData::from_bytes(&packet.payload)?
        else {
            return Err(InterchainError::MalformedPayload.into());
        };
        let hs_key = format!("{}/{}", path.channel, packet.sequence);
        if !self.handshakes.contains_key(&hs_key) {
            if self.packets.has_receipt(&key) {
                return Err(InterchainError::ReplayRejected(key).into());
            }
            return Err(InterchainError::UnknownHandshake(hs_key).into());
        }
        self.packets.receive(packet)?;
        let hs = self.handshakes.remove(&hs_key).expect("checked above");

        let will = self.will(&hs.did)?.clone();
        let index = will.component_index(&hs.component)?;
        let comp = &will.components[index];
        let verdict = match &hs.kind {
            HandshakeKind::Execution if comp.state != ComponentState::Executed => {
                Verdict::Ineligible("component has not executed".into())
            }
            HandshakeKind::Claim { .. } if comp.state == ComponentState::Executed => {
                Verdict::Ineligible("component already executed".into())
            }
            HandshakeKind::Claim { .. } if !will.is_expired() => Verdict::Early,
            _ if !creator_approved => {
                Verdict::Ineligible("creator has not approved the contract".into())
            }
            _ if !escrow_sufficient => Verdict::Ineligible("insufficient escrow".into()),
            _ if already_released => Verdict::Ineligible("escrow already released".into()),
            _ => Verdict::Eligible,
        };

        if let HandshakeKind::Claim { claimant, bond } = hs.kind {
            self.bonded -= bond;
            let denom = self.params.native_denom.clone();
            match verdict {
                Verdict::Early => self.burned += bond,
                _ => self.credit(&claimant, &denom, bond),
            }
            if verdict == Verdict::Eligible {
                let output = will.components[index].output.clone();
                self.log_output(
                    &hs.did,
                    &crate::will::Emitted {
                        component: hs.component.clone(),
                        output,
                    },
                );
                let mut will = will.clone();
                will.components[index].state = ComponentState::Executed;
                will.components[index].claim_window = None;
                will.settle();
                self.wills.insert(hs.did.clone(), will);
            }
        }

        let confirm = PacketData::Confirm {
            verdict: verdict.clone(),
        }
        .to_bytes();
        let back = self.channels[&path.channel].clone();
        self.packets
            .send(back, packet.sequence, Phase::Confirm, confirm);
        let (label, reason) = match &verdict {
            Verdict::Eligible => ("eligible", String::new()),
            Verdict::Early => ("early", String::new()),
            Verdict::Ineligible(r) => ("ineligible", r.clone()),
        };
        self.emit(
            "handshake_verdict",
            &[
                ("did", hs.did.to_string()),
                ("component", hs.component.clone()),
                ("verdict", label.to_string()),
                ("reason", reason),
            ],
        );
        Ok(verdict)
    }
}
