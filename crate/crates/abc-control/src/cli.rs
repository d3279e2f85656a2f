//! Command-line front end (scenario configs, CSV emission, verification suites).
