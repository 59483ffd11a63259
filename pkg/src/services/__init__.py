"""Services module - audio, trajectory, manifest and artifact I/O."""
