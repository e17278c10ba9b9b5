"""Underground backscatter (UHF RFID / ambient IoT) link and field simulation."""
from .device_profiles import DeviceClass, DeviceProfile, architecture_table, coverage_envelope, density_check, preset
from .field_sim import (FieldLayout, LossModifiers, ReaderRig, TrialResult, calibrate_modifiers,
                        load_calibrated_modifiers, moisture_map_from_zones, simulate_pass, trial_preset)
from .link_budget import (Configuration, LinkParams, NoSolutionError, RangeReport, activation_distance,
                          read_distance, solve_range, sweep_vwc)
from .mac_inventory import (expected_successes, framed_slotted_aloha, inventory_within_window,
                            q_protocol_inventory)
from .soil_channel import (ComplexPermittivity, Direction, LinkGeometry, SoilProfile, composite_path_loss,
                           propagation_constants, refraction_loss, soil_complex_permittivity,
                           underground_path_loss)

__version__ = "0.1.0"
