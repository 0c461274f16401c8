#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "homoflow/flow.hpp"
#include "homoflow/grid_signal.hpp"
#include "homoflow/orthons.hpp"

namespace homoflow::io {

namespace fs = std::filesystem;

/// Value range stored next to a 16-bit PGM so the image decodes to the
/// original floating-point values (up to 16-bit quantization).
struct PgmScale {
  double min = 0.0;
  double max = 1.0;
};

/// A single column gives a 1D signal, several columns a 2D image. Blank lines
/// and lines starting with '#' are skipped; a non-numeric first row is taken
/// as a header.
GridSignal read_csv(const fs::path& path, double spacing = 1.0);
void write_csv(const fs::path& path, const GridSignal& signal);

/// Binary P5 with maxval <= 65535. Values map to [0, 1] unless a sidecar
/// `<path>.scale.json` exists, in which case they map to [min, max].
GridSignal read_pgm(const fs::path& path, double spacing = 1.0);
/// 16-bit P5 plus the sidecar scale file. Returns the scale used.
PgmScale write_pgm16(const fs::path& path, const GridSignal& image);
fs::path scale_sidecar(const fs::path& pgm);

/// Dispatches on the extension (.csv or .pgm).
GridSignal read_signal(const fs::path& path, double spacing = 1.0);
/// 1D signals and .csv paths are written as CSV, 2D .pgm as 16-bit PGM.
void write_signal(const fs::path& path, const GridSignal& signal);

/// psi_00000.csv, psi_00001.csv, ... plus times.csv with the cumulative times.
void write_snapshots(const fs::path& dir, const SnapshotSequence& seq);

struct LoadedSnapshots {
  SnapshotSequence seq;
  bool has_times = false;
};

/// Reads every psi_* file in lexical order. Without times.csv the steps
/// default to 1.
LoadedSnapshots read_snapshots(const fs::path& dir);

std::vector<double> read_column(const fs::path& path);
void write_column(const fs::path& path, const std::string& header,
                  const std::vector<double>& values);

std::string decomposition_to_json(const OrthoNsDecomposition& dec);
OrthoNsDecomposition decomposition_from_json(const std::string& text);
void write_decomposition(const fs::path& path, const OrthoNsDecomposition& dec);
OrthoNsDecomposition read_decomposition(const fs::path& path);

}  // namespace homoflow::io
