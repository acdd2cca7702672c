const util = require('util');
const { exec } = require('child_process');
const execAsync = util.promisify(exec);

async function install(pkg) {
  const { stdout } = await execAsync(`npm install ${pkg}`);
  return stdout;
}

module.exports = { install };

// expect: ApiParam pkg 5 install CmdInj 6
