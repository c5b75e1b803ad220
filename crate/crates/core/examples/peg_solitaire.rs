//! Play a 4×4 peg solitaire game, planning every move with VOC(φ)-greedy.

use mcts_voc::bench::{tuned_config, EnvKind};
use mcts_voc::env::{min_pegs, PegBoard, PegSolitaire};
use mcts_voc::policies::{plan, PolicyKind};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> mcts_voc::error::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let mut board = PegBoard::random(9, &mut rng)?;
    let config = tuned_config(PolicyKind::VocPhi, EnvKind::Pegs);
    println!("start ({} pegs, best possible {}):\n{board}", board.pegs(), min_pegs(board));

    while !board.is_terminal() {
        let d = plan(&PegSolitaire, &board, 32, &config, &mut rng)?;
        let m = board.nth_legal_move(d.action).expect("planner returns a legal move");
        board = board.apply(m)?;
        println!("jump {} -> {} ({} simulations):\n{board}", m.from, m.to, d.simulations);
    }
    println!("finished with {} pegs", board.pegs());
    Ok(())
}
