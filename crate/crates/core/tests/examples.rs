//! Every example must run to completion.

macro_rules! example {
    ($name:ident) => {
        mod $name {
            #![allow(dead_code)]
            include!(concat!("../examples/", stringify!($name), ".rs"));
            #[test]
            fn runs() {
                main();
            }
        }
    };
}

example!(spectral_basics);
example!(steady_state);
example!(linear_stability);
example!(pptt_energy);
example!(tt_hypocoercivity);
example!(linear_decay_fit);
example!(inequality_lab);
example!(smallgrid_oracle);
example!(checkpoint_roundtrip);
example!(config_driven);
