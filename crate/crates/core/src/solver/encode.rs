//! 128-bit encoding of cop-to-move positions.
//!
//! Layout: bits 0..64 damaged set, 64..70 cop, 70..74 live robber count,
//! then 6 bits per live robber position in ascending order. Robbers are
//! interchangeable, so only the sorted multiset of live positions is kept.

use crate::graph::Vertex;
use crate::rules::{GameState, Phase, RobberStatus};
use crate::Graph;

pub const MAX_VERTICES: usize = 64;
pub const MAX_ROBBERS: usize = 8;

const POS_BITS: u32 = 6;
const POS_MASK: u128 = (1 << POS_BITS) - 1;

pub type Key = u128;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Position {
    pub cop: u8,
    pub live: u8,
    pub robbers: [u8; MAX_ROBBERS],
    pub damaged: u64,
}

impl Position {
    pub fn new(cop: Vertex, robbers: &[Vertex], damaged: u64) -> Position {
        debug_assert!(robbers.len() <= MAX_ROBBERS);
        let mut arr = [0u8; MAX_ROBBERS];
        for (slot, &r) in arr.iter_mut().zip(robbers) {
            *slot = r as u8;
        }
        arr[..robbers.len()].sort_unstable();
        Position {
            cop: cop as u8,
            live: robbers.len() as u8,
            robbers: arr,
            damaged,
        }
    }

    pub fn robbers(&self) -> &[u8] {
        &self.robbers[..self.live as usize]
    }

    pub fn pack(&self) -> Key {
        let mut key = self.damaged as u128;
        key |= (self.cop as u128) << 64;
        key |= (self.live as u128) << 70;
        for (k, &r) in self.robbers().iter().enumerate() {
            key |= (r as u128) << (74 + POS_BITS * k as u32);
        }
        key
    }

    pub fn unpack(key: Key) -> Position {
        let live = ((key >> 70) & 0xF) as u8;
        let mut robbers = [0u8; MAX_ROBBERS];
        for (k, slot) in robbers.iter_mut().enumerate().take(live as usize) {
            *slot = ((key >> (74 + POS_BITS * k as u32)) & POS_MASK) as u8;
        }
        Position {
            cop: ((key >> 64) & POS_MASK) as u8,
            live,
            robbers,
            damaged: key as u64,
        }
    }

    /// Progress class: (live robbers, damaged set).
    pub fn class(&self) -> (u8, u64) {
        (self.live, self.damaged)
    }

    pub fn from_state(state: &GameState) -> Position {
        let robbers: Vec<Vertex> = state.live_positions();
        Position::new(state.cop_vertex(), &robbers, state.damaged().low_word())
    }

    /// A cop-to-move game state with robbers numbered in ascending position.
    pub fn to_state(&self, g: &Graph, round: u32) -> GameState {
        let damaged: Vec<Vertex> = (0..64).filter(|b| self.damaged >> b & 1 == 1).collect();
        let robbers = self
            .robbers()
            .iter()
            .map(|&r| RobberStatus::Live(r as Vertex))
            .collect::<Vec<_>>();
        let robbers = if robbers.is_empty() {
            vec![RobberStatus::Caught]
        } else {
            robbers
        };
        GameState::from_parts(g, self.cop as Vertex, robbers, &damaged, Phase::CopToMove, round)
            .expect("decoded position is in range")
    }
}

/// Every sorted multiset of `k` destinations where robber `i` picks from
/// `options[i]`; deduplicated.
pub fn joint_destinations(options: &[&[Vertex]], out: &mut Vec<Vec<Vertex>>) {
    out.clear();
    if options.is_empty() {
        out.push(Vec::new());
        return;
    }
    let mut idx = vec![0usize; options.len()];
    let mut buf = Vec::with_capacity(options.len());
    loop {
        buf.clear();
        buf.extend(idx.iter().zip(options).map(|(&i, o)| o[i]));
        buf.sort_unstable();
        out.push(buf.clone());
        let mut k = options.len();
        loop {
            if k == 0 {
                out.sort_unstable();
                out.dedup();
                return;
            }
            k -= 1;
            idx[k] += 1;
            if idx[k] < options[k].len() {
                break;
            }
            idx[k] = 0;
        }
    }
}
