//! Every chapter of `book/` is pulled in as a doc comment so that
//! `cargo test` runs its listings. Nothing here is meant to be used.

macro_rules! chapter {
    ($name:ident, $file:literal) => {
        #[doc = include_str!(concat!("../../../book/src/", $file))]
        pub mod $name {}
    };
}

chapter!(introduction, "introduction.md");
chapter!(chips, "chips.md");
chapter!(evolution, "evolution.md");
chapter!(photons, "photons.md");
chapter!(training, "training.md");
chapter!(seeds, "seeds.md");
chapter!(scenarios, "scenarios.md");
chapter!(warmstart, "warmstart.md");
