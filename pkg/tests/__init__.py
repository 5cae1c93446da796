# Tests for the photon-axion cavity simulator
