// Every example must keep running against the current API.

macro_rules! example {
    ($name:ident) => {
        mod $name {
            include!(concat!(
                env!("CARGO_MANIFEST_DIR"),
                "/examples/",
                stringify!($name),
                ".rs"
            ));

            #[test]
            fn runs() {
                main().unwrap();
            }
        }
    };
}

example!(simulate_paths);
example!(market_gauge);
example!(gauge_invariance);
example!(diversification);
example!(price_option);
example!(hedging);
example!(discount_pipeline);
example!(sensitivity_weights);
example!(numeraire_cross_terms);
