//! Refungible shares over a will's escrow.
//!
//! Heir `i` holds `s_i` of `S = Σ s_i` shares and redeems
//! `floor(escrow · s_i / S)` once the will has expired; redeemed shares are
//! burned. Rounding dust stays in escrow.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::address::Address;
use crate::will::model::Will;
use crate::will::{Did, WillError};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShareLedger {
    pub will: Did,
    /// `S`. Fixed at mint; burned shares still count toward it.
    pub total: u64,
    pub balances: BTreeMap<Address, u64>,
    pub burned: u64,
    /// Escrow snapshot all payouts are computed from.
    pub escrow_at_mint: u64,
    /// Escrow still held.
    pub escrow: u64,
}

pub fn mint_rft(
    w: &Will,
    shares: &BTreeMap<Address, u64>,
    escrow_amount: u64,
) -> Result<ShareLedger, WillError> {
    if shares.is_empty() {
        return Err(WillError::Validation("share map is empty".into()));
    }
    if let Some((who, _)) = shares.iter().find(|(_, &s)| s == 0) {
        return Err(WillError::Validation(format!("zero share for {who}")));
    }
    let total = shares
        .values()
        .try_fold(0u64, |acc, &s| acc.checked_add(s))
        .ok_or_else(|| WillError::Validation("share total overflows".into()))?;
    Ok(ShareLedger {
        will: w.did.clone(),
        total,
        balances: shares.clone(),
        burned: 0,
        escrow_at_mint: escrow_amount,
        escrow: escrow_amount,
    })
}

impl ShareLedger {
    /// `p_i = s_i / S` as a float, for display.
    pub fn fraction(&self, heir: &Address) -> f64 {
        let s = self.balances.get(heir).copied().unwrap_or(0);
        s as f64 / self.total as f64
    }

    pub fn payout_for(&self, shares: u64) -> u64 {
        ((self.escrow_at_mint as u128 * shares as u128) / self.total as u128) as u64
    }

    /// Escrow that can never be paid out: what remains once every heir has
    /// redeemed.
    pub fn dust(&self) -> u64 {
        let owed: u64 = self.balances.values().map(|&s| self.payout_for(s)).sum();
        self.escrow - owed
    }

    pub fn outstanding_shares(&self) -> u64 {
        self.balances.values().sum()
    }
}

pub fn rft_claim(
    ledger: &ShareLedger,
    claimant: &Address,
    w: &Will,
) -> Result<(ShareLedger, u64), WillError> {
    if w.did != ledger.will {
        return Err(WillError::Validation(
            "ledger belongs to a different will".into(),
        ));
    }
    if !w.is_expired() {
        return Err(WillError::PrematureClaim);
    }
    let shares = ledger.balances.get(claimant).copied().unwrap_or(0);
    if shares == 0 {
        return Err(WillError::NothingToClaim);
    }
    let payout = ledger.payout_for(shares);
    let mut next = ledger.clone();
    next.balances.insert(*claimant, 0);
    next.burned += shares;
    next.escrow -= payout;
    Ok((next, payout))
}
