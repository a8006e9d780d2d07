// placeholder while the core crate is under construction
