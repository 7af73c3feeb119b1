#include <iostream>

#include "cli_util.hpp"
#include "commands.hpp"
#include "nomiclaw/ledger.hpp"

namespace nomiclaw::cli {

int run_export(const ExportArgs& args) {
  if (!std::filesystem::is_directory(args.logs_dir))
    throw ValidationError("log directory not found: " + args.logs_dir.string());
  LoadResult loaded = load_run_logs(args.logs_dir);
  for (const auto& err : loaded.errors)
    std::cerr << "load error: " << err.file << ": " << err.reason << "\n";
  if (loaded.logs.empty()) {
    std::cerr << "no run logs found in " << args.logs_dir.string() << "\n";
    return kInputFailure;
  }

  Table table = export_rows(loaded.logs);
  write_table_csv(table, args.csv_path);

  std::map<std::string, int> expected_rounds;
  for (const auto& log : loaded.logs)
    expected_rounds[log.run_id] = log.config.num_rounds;
  BalanceReport balance = verify_balance(table, &expected_rounds);

  std::cout << "exported " << table.size() << " rows from " << loaded.logs.size()
            << " runs to " << args.csv_path.string() << "\n";
  std::cout << "balance: " << (balance.is_balanced ? "ok" : "UNBALANCED")
            << " excluded_rounds=" << balance.excluded_rounds << "\n";
  for (const auto& offender : balance.offenders)
    std::cout << "  unbalanced agent: " << offender << "\n";

  if (!loaded.errors.empty()) return kInputFailure;
  if (!balance.is_balanced && !args.allow_unbalanced) return kInputFailure;
  return kOk;
}

}  // namespace nomiclaw::cli
