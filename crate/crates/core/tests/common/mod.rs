pub mod oracles;
pub mod planted;
pub mod texture_oracle;
