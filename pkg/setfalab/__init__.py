"""Defines the top-level setfalab API.

This package is structured so that all the important stuff can be accessed
without having to dig around through the internals. This is done by lazily
importing the module by name.
"""

__version__ = "0.1.0"

__all__ = [
    "UserConfig",
    "field",
    "get_run_dir",
    "load_user_config",
    "State160",
    "get_nibbles",
    "set_nibbles",
    "state_from_hex",
    "state_from_octets",
    "state_to_hex",
    "state_to_octets",
    "SPONGENT_SBOX",
    "SboxTable",
    "NonBijectiveSboxError",
    "ZeroCounterError",
    "add_round_constant",
    "icounter_next",
    "p_layer",
    "p_layer_inv",
    "permute",
    "permute_inv",
    "sbox_layer",
    "Bin160Map",
    "MaskNotInvertibleError",
    "invert_map",
    "linear_map_matrix",
    "mask",
    "phi1",
    "phi2",
    "AeadInputs",
    "DumboParams",
    "decrypt",
    "encrypt",
    "FaultMap",
    "FaultMapError",
    "Gate",
    "Netlist",
    "canonical_netlist",
    "evaluate",
    "faulty_truth_table",
    "missing_values",
    "HotspotConfig",
    "HotspotRecord",
    "HotspotSummary",
    "NoUsableHotspotError",
    "SelectionPolicy",
    "classify_fault_map",
    "enumerate_hotspots",
    "select_fault_combination",
    "stabilizer",
    "summarize_hotspots",
    "write_hotspots_csv",
    "AttackConfig",
    "AttackerModel",
    "FaultScope",
    "InversionSanityError",
    "ModelInconsistencyError",
    "NibbleCandidates",
    "NotConvergedError",
    "TrialResult",
    "eliminate",
    "extract_candidate_nibble",
    "faulty_encrypt_block1",
    "recover_expanded_key",
    "recover_master_key",
    "run_trial",
    "CampaignConfig",
    "CampaignReport",
    "campaign",
    "configure_logging",
]

import os
from typing import TYPE_CHECKING

# If this flag is set, eagerly imports the entire package (not recommended).
IMPORT_ALL = int(os.environ.get("SETFALAB_IMPORT_ALL", "0")) != 0

del os

NAME_MAP: dict[str, str] = {
    "UserConfig": "core.conf",
    "field": "core.conf",
    "get_run_dir": "core.conf",
    "load_user_config": "core.conf",
    "State160": "core.state",
    "get_nibbles": "core.state",
    "set_nibbles": "core.state",
    "state_from_hex": "core.state",
    "state_from_octets": "core.state",
    "state_to_hex": "core.state",
    "state_to_octets": "core.state",
    "SPONGENT_SBOX": "cipher.sbox",
    "SboxTable": "cipher.sbox",
    "NonBijectiveSboxError": "cipher.spongent",
    "ZeroCounterError": "cipher.spongent",
    "add_round_constant": "cipher.spongent",
    "icounter_next": "cipher.spongent",
    "p_layer": "cipher.spongent",
    "p_layer_inv": "cipher.spongent",
    "permute": "cipher.spongent",
    "permute_inv": "cipher.spongent",
    "sbox_layer": "cipher.spongent",
    "Bin160Map": "cipher.gf2",
    "MaskNotInvertibleError": "cipher.gf2",
    "invert_map": "cipher.gf2",
    "linear_map_matrix": "cipher.masking",
    "mask": "cipher.masking",
    "phi1": "cipher.masking",
    "phi2": "cipher.masking",
    "AeadInputs": "cipher.dumbo",
    "DumboParams": "cipher.dumbo",
    "decrypt": "cipher.dumbo",
    "encrypt": "cipher.dumbo",
    "FaultMap": "circuit.netlist",
    "FaultMapError": "circuit.netlist",
    "Gate": "circuit.netlist",
    "Netlist": "circuit.netlist",
    "canonical_netlist": "circuit.netlist",
    "evaluate": "circuit.netlist",
    "faulty_truth_table": "circuit.netlist",
    "missing_values": "circuit.netlist",
    "HotspotConfig": "attack.hotspots",
    "HotspotRecord": "attack.hotspots",
    "HotspotSummary": "attack.hotspots",
    "NoUsableHotspotError": "attack.hotspots",
    "SelectionPolicy": "attack.hotspots",
    "classify_fault_map": "attack.hotspots",
    "enumerate_hotspots": "attack.hotspots",
    "select_fault_combination": "attack.hotspots",
    "stabilizer": "attack.hotspots",
    "summarize_hotspots": "attack.hotspots",
    "write_hotspots_csv": "attack.hotspots",
    "AttackConfig": "attack.setfa",
    "AttackerModel": "attack.setfa",
    "FaultScope": "attack.setfa",
    "InversionSanityError": "attack.setfa",
    "ModelInconsistencyError": "attack.setfa",
    "NibbleCandidates": "attack.setfa",
    "NotConvergedError": "attack.setfa",
    "TrialResult": "attack.setfa",
    "eliminate": "attack.setfa",
    "extract_candidate_nibble": "attack.setfa",
    "faulty_encrypt_block1": "attack.setfa",
    "recover_expanded_key": "attack.setfa",
    "recover_master_key": "attack.setfa",
    "run_trial": "attack.setfa",
    "CampaignConfig": "attack.campaign",
    "CampaignReport": "attack.campaign",
    "campaign": "attack.campaign",
    "configure_logging": "utils.logging",
}


def __getattr__(name: str) -> object:
    if name not in NAME_MAP:
        raise AttributeError(f"{__name__} has no attribute {name}")

    module_name = f"setfalab.{NAME_MAP[name]}"
    module = __import__(module_name, fromlist=[name])
    return getattr(module, name)


if IMPORT_ALL or TYPE_CHECKING:
    from setfalab.attack.campaign import CampaignConfig, CampaignReport, campaign
    from setfalab.attack.hotspots import (
        HotspotConfig,
        HotspotRecord,
        HotspotSummary,
        NoUsableHotspotError,
        SelectionPolicy,
        classify_fault_map,
        enumerate_hotspots,
        select_fault_combination,
        stabilizer,
        summarize_hotspots,
        write_hotspots_csv,
    )
    from setfalab.attack.setfa import (
        AttackConfig,
        AttackerModel,
        FaultScope,
        InversionSanityError,
        ModelInconsistencyError,
        NibbleCandidates,
        NotConvergedError,
        TrialResult,
        eliminate,
        extract_candidate_nibble,
        faulty_encrypt_block1,
        recover_expanded_key,
        recover_master_key,
        run_trial,
    )
    from setfalab.cipher.dumbo import AeadInputs, DumboParams, decrypt, encrypt
    from setfalab.cipher.gf2 import Bin160Map, MaskNotInvertibleError, invert_map
    from setfalab.cipher.masking import linear_map_matrix, mask, phi1, phi2
    from setfalab.cipher.sbox import SPONGENT_SBOX, SboxTable
    from setfalab.cipher.spongent import (
        NonBijectiveSboxError,
        ZeroCounterError,
        add_round_constant,
        icounter_next,
        p_layer,
        p_layer_inv,
        permute,
        permute_inv,
        sbox_layer,
    )
    from setfalab.circuit.netlist import (
        FaultMap,
        FaultMapError,
        Gate,
        Netlist,
        canonical_netlist,
        evaluate,
        faulty_truth_table,
        missing_values,
    )
    from setfalab.core.conf import UserConfig, field, get_run_dir, load_user_config
    from setfalab.core.state import (
        State160,
        get_nibbles,
        set_nibbles,
        state_from_hex,
        state_from_octets,
        state_to_hex,
        state_to_octets,
    )
    from setfalab.utils.logging import configure_logging
