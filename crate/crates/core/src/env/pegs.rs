//! Peg solitaire on a 4×4 board with orthogonal jumps.
//!
//! A move jumps a peg over an orthogonally adjacent peg into the empty cell
//! beyond; the jumped peg is removed. The game ends when no move is left and
//! scores the number of pegs remaining (lower is better).

use std::fmt;

use rand::seq::index::sample;
use rand::Rng;

use crate::error::{Error, Result};
use crate::mdp::{Mdp, Transition};

pub const SIDE: usize = 4;
pub const CELLS: usize = SIDE * SIDE;

/// One jump: `from` over `over` into `to`, as cell indices `row * 4 + col`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Move {
    pub from: u8,
    pub over: u8,
    pub to: u8,
}

/// All 32 geometrically possible jumps, cell by cell, then east, west,
/// south, north.
pub const MOVES: [Move; 32] = build_moves();

const fn build_moves() -> [Move; 32] {
    let mut out = [Move { from: 0, over: 0, to: 0 }; 32];
    let dirs: [(i32, i32); 4] = [(0, 1), (0, -1), (1, 0), (-1, 0)];
    let mut k = 0;
    let mut cell = 0;
    while cell < CELLS {
        let (r, c) = ((cell / SIDE) as i32, (cell % SIDE) as i32);
        let mut d = 0;
        while d < 4 {
            let (dr, dc) = dirs[d];
            let (r2, c2) = (r + 2 * dr, c + 2 * dc);
            if r2 >= 0 && r2 < SIDE as i32 && c2 >= 0 && c2 < SIDE as i32 {
                out[k] = Move {
                    from: cell as u8,
                    over: ((r + dr) * SIDE as i32 + c + dc) as u8,
                    to: (r2 * SIDE as i32 + c2) as u8,
                };
                k += 1;
            }
            d += 1;
        }
        cell += 1;
    }
    out
}

/// Board occupancy as a bitmask; bit `row * 4 + col` set means a peg.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PegBoard(pub u16);

impl PegBoard {
    pub fn from_cells(cells: &[(usize, usize)]) -> Result<Self> {
        let mut bits = 0u16;
        for &(r, c) in cells {
            if r >= SIDE || c >= SIDE {
                return Err(Error::InvalidParameter(format!("cell ({r}, {c}) off the board")));
            }
            bits |= 1 << (r * SIDE + c);
        }
        Ok(PegBoard(bits))
    }

    /// `pegs` pegs on distinct cells chosen uniformly at random.
    pub fn random<R: Rng + ?Sized>(pegs: usize, rng: &mut R) -> Result<Self> {
        if pegs > CELLS {
            return Err(Error::InvalidParameter(format!("{pegs} pegs on {CELLS} cells")));
        }
        let mut bits = 0u16;
        for i in sample(rng, CELLS, pegs).iter() {
            bits |= 1 << i;
        }
        Ok(PegBoard(bits))
    }

    pub fn pegs(self) -> u32 {
        self.0.count_ones()
    }

    pub fn has_peg(self, r: usize, c: usize) -> bool {
        self.0 & (1 << (r * SIDE + c)) != 0
    }

    pub fn is_legal(self, m: Move) -> bool {
        let b = self.0;
        b & (1 << m.from) != 0 && b & (1 << m.over) != 0 && b & (1 << m.to) == 0
    }

    /// Legal moves in [`MOVES`] order.
    pub fn legal_moves(self) -> Vec<Move> {
        MOVES.iter().copied().filter(|&m| self.is_legal(m)).collect()
    }

    pub fn num_legal_moves(self) -> usize {
        MOVES.iter().filter(|&&m| self.is_legal(m)).count()
    }

    pub fn nth_legal_move(self, n: usize) -> Option<Move> {
        MOVES.iter().copied().filter(|&m| self.is_legal(m)).nth(n)
    }

    pub fn apply(self, m: Move) -> Result<Self> {
        if !self.is_legal(m) {
            return Err(Error::IllegalMove);
        }
        Ok(PegBoard(self.0 & !(1 << m.from) & !(1 << m.over) | (1 << m.to)))
    }

    pub fn is_terminal(self) -> bool {
        self.num_legal_moves() == 0
    }

    /// Row-major occupancy string, `o` for a peg and `.` for a hole.
    pub fn to_text(self) -> String {
        (0..CELLS).map(|i| if self.0 & (1 << i) != 0 { 'o' } else { '.' }).collect()
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let text = text.trim();
        if text.chars().count() != CELLS {
            return Err(Error::Parse { line: 1, msg: format!("board needs {CELLS} cells, got `{text}`") });
        }
        let mut bits = 0u16;
        for (i, ch) in text.chars().enumerate() {
            match ch {
                'o' => bits |= 1 << i,
                '.' => {}
                _ => return Err(Error::Parse { line: 1, msg: format!("unexpected cell `{ch}`") }),
            }
        }
        Ok(PegBoard(bits))
    }
}

impl fmt::Display for PegBoard {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let t = self.to_text();
        for r in 0..SIDE {
            writeln!(f, "{}", &t[r * SIDE..(r + 1) * SIDE])?;
        }
        Ok(())
    }
}

/// Peg solitaire as an MDP: action `i` is the `i`-th legal move, the
/// terminal value is minus the pegs left, intermediate rewards are zero.
#[derive(Debug, Clone, Copy, Default)]
pub struct PegSolitaire;

impl Mdp for PegSolitaire {
    type State = PegBoard;

    fn num_actions(&self, state: &PegBoard) -> usize {
        state.num_legal_moves()
    }

    fn transitions(&self, state: &PegBoard, action: usize) -> Vec<Transition<PegBoard>> {
        let m = state.nth_legal_move(action).expect("action index out of range");
        vec![Transition::new(state.apply(m).expect("legal move"), 1.0, 0.0)]
    }

    fn terminal_value(&self, state: &PegBoard) -> f64 {
        -(state.pegs() as f64)
    }

    /// Pessimistic guess: no further pegs removed.
    fn value_hint(&self, state: &PegBoard) -> f64 {
        -(state.pegs() as f64)
    }
}

/// Fewest pegs reachable from `board` with perfect play.
pub fn min_pegs(board: PegBoard) -> u32 {
    fn go(b: PegBoard, memo: &mut std::collections::HashMap<PegBoard, u32>) -> u32 {
        if let Some(&v) = memo.get(&b) {
            return v;
        }
        let v = b.legal_moves().into_iter().map(|m| go(b.apply(m).unwrap(), memo)).min().unwrap_or(b.pegs());
        memo.insert(b, v);
        v
    }
    go(board, &mut std::collections::HashMap::new())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn move_table_has_32_jumps() {
        assert_eq!(MOVES.len(), 32);
        let unique: std::collections::HashSet<_> = MOVES.iter().collect();
        assert_eq!(unique.len(), 32);
        assert_eq!(MOVES[0], Move { from: 0, over: 1, to: 2 });
    }

    #[test]
    fn single_jump() {
        let b = PegBoard::from_cells(&[(0, 0), (0, 1)]).unwrap();
        assert!(b.legal_moves().contains(&Move { from: 0, over: 1, to: 2 }));
        let after = b.apply(Move { from: 0, over: 1, to: 2 }).unwrap();
        assert_eq!(after.pegs(), 1);
        assert!(after.has_peg(0, 2));
        assert!(after.is_terminal());
        assert!(matches!(after.apply(Move { from: 0, over: 1, to: 2 }), Err(Error::IllegalMove)));
    }

    #[test]
    fn full_and_isolated_boards_are_terminal() {
        assert_eq!(PegBoard(u16::MAX).num_legal_moves(), 0);
        assert!(PegBoard::from_cells(&[(2, 2)]).unwrap().is_terminal());
    }

    #[test]
    fn random_boards_have_nine_pegs_and_short_games() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for _ in 0..50 {
            let mut b = PegBoard::random(9, &mut rng).unwrap();
            assert_eq!(b.pegs(), 9);
            let mut moves = 0;
            while let Some(m) = b.legal_moves().first().copied() {
                let before = b.pegs();
                b = b.apply(m).unwrap();
                assert_eq!(b.pegs(), before - 1);
                moves += 1;
            }
            assert!(moves <= 8);
        }
    }

    #[test]
    fn text_round_trip() {
        let b = PegBoard::from_cells(&[(0, 0), (1, 2), (3, 3)]).unwrap();
        assert_eq!(b.to_text(), "o.....o........o");
        assert_eq!(PegBoard::from_text(&b.to_text()).unwrap(), b);
        assert!(PegBoard::from_text("oo").is_err());
        assert!(PegBoard::from_text("x...............").is_err());
    }

    #[test]
    fn solver_on_three_in_a_row() {
        let b = PegBoard::from_cells(&[(1, 0), (1, 1), (1, 3)]).unwrap();
        // (1,0) over (1,1) lands on (1,2), then (1,3) over (1,2) into (1,1).
        assert_eq!(min_pegs(b), 1);
    }
}
