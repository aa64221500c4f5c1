#pragma once

// Text checkpoints: a flat list of named real arrays.
//
//   sbqe-checkpoint 1
//   meta <key> <value>          (zero or more; value runs to end of line)
//   arrays <count>
//   <name> <ndims> <dim0> ...   (one header line per array)
//   <v0> <v1> ...               (values in row-major order, %.17g)

#include <filesystem>
#include <map>
#include <string>

#include "sbqe/model.hpp"
#include "sbqe/params.hpp"

namespace sbqe {

struct Checkpoint {
    std::map<std::string, std::string> meta;
    ParamTable params;
};

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::filesystem::path& path);

// Stores the model spec in the metadata so load_model can rebuild it.
void save_model(const std::filesystem::path& path, const Model& model);
Model load_model(const std::filesystem::path& path);

} // namespace sbqe
