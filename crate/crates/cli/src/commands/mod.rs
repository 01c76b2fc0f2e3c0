pub mod asymptotics;
pub mod converge;
pub mod determinants;
pub mod spectrum;
pub mod verify;
pub mod wavefunction;
