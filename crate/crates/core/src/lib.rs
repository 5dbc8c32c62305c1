pub mod actionlang;
pub mod game;
pub mod opponents;
pub mod scenarios;
pub mod team;
pub mod world;
