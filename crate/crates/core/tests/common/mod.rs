pub mod oracles;
pub mod sim_oracle;
