"""This module contains message templates for logging messages which are sent from
multiple places in the code in some variation."""

### PARSING ###


def parsed_field(source, node_count):
    msg = f"Parsed field '{source}' ({node_count} nodes)."
    return msg


def loaded_graph(path, node_count):
    msg = f"Loaded field graph from '{path}' ({node_count} nodes)."
    return msg


### SAMPLING ###


def sampling_shortfall(found, requested, level):
    msg = (
        f"Only {found} of {requested} boundary samples converged on level {level}, "
        + "continuing with a partial sample set."
    )
    return msg


def sampling_time(count, level, elapsed_time):
    msg = f"Sampled {count} boundary points on level {level} in {elapsed_time:.3f}s."
    return msg


def projection_failures(count, reason):
    msg = f"{count} projections failed ({reason})."
    return msg


def locus_projection_failures(count):
    msg = f"{count} seeds could not be moved towards the degenerate locus and stay unclustered."
    return msg


### CLASSIFICATION ###


def type_detected(point, c_p):
    msg = f"Type at {tuple(round(float(c), 12) for c in point)}: {c_p}."
    return msg


def type_level(length, magnitude, threshold):
    msg = f"Words of length {length}: max |value| {magnitude:.3e}, zero threshold {threshold:.3e}."
    return msg


### CONSTRUCTION ###


def multiplier_built(kind, node_count, minimum_denominator):
    msg = (
        f"Built {kind} multiplier ({node_count} nodes), "
        + f"minimal denominator on samples {minimum_denominator:.3e}."
    )
    return msg


def globalized(k1, k2):
    msg = f"Globalized with K1 = {k1:.6g}, K2 = {k2:.6g}."
    return msg


### CERTIFICATION ###


def certificate_result(condition, verdict, elapsed_time):
    msg = f"Certificate {condition}: {verdict} ({elapsed_time:.3f}s)."
    return msg


def level_statistics(level, usable, max_ratio, residual):
    msg = (
        f"Level {level}: {usable} usable samples, max ratio {max_ratio:.3e}, "
        + f"small denominator residual {residual:.3e}."
    )
    return msg


def skipped_directions(skipped, evaluated):
    msg = f"Skipped {skipped} of {skipped + evaluated} direction/sample pairs with tiny denominators."
    return msg


def not_applicable(check, reason):
    msg = f"{check} is not applicable: {reason}."
    return msg


### CLI ###


def suite_check(name, verdict, elapsed_time):
    msg = f"Suite check '{name}': {verdict} ({elapsed_time:.3f}s)."
    return msg


def wrote_output(path):
    msg = f"Wrote '{path}'."
    return msg


def operational_error(error):
    msg = f"{type(error).__name__}: {error}"
    return msg
