const fs = require('fs');
const { exec } = require('child_process');

/**
 * Archives a directory and returns the archive name.
 * @param {string} target directory to archive
 */
function archive(target) {
  const name = target + '.tar.gz';
  exec('tar czf ' + name + ' ' + target);
  fs.unlinkSync(target + '.lock');
  return name;
}

module.exports = { archive };

// expect: ApiParam target 8 archive CmdInj 10
// expect: ApiParam target 8 archive PathTrav 11
